use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use dill::classify::report::classify;
use dill::classify::{
    decide_diamond_uniform, verdict_weyl_h, witness_pair, DiamondUniformity, Outcome, SamplingBudget,
};
use dill::dillmaps::RuleTable;
use dill::distances::{cantor, hamming, levenshtein};
use dill::proptests::{suite_dillmaps, suite_distances, suite_pseudometrics, suite_theorems};
use dill::pseudometrics::{weyl_ladder, BaseDistance, OffsetPolicy};
use dill::reproduce::{self, ReproduceParams};
use dill::scalar::ratio_text;
use dill::words::{Alphabet, ConfigGenerator};
use dill::Rational;

#[derive(Parser)]
#[command(
    name = "dill",
    version,
    about = "Dill maps, edit distances and sliding pseudo-metric estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two words (or two configurations for cantor).
    Dist {
        u: String,
        v: String,
        #[arg(long, value_enum, default_value = "levenshtein")]
        metric: Metric,
        /// Letters, in order; inferred from the inputs when omitted.
        #[arg(long)]
        alphabet: Option<String>,
        /// Prefix length examined by the cantor metric.
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
    /// Sliding estimates between two configurations, or between their images.
    Pseudo {
        x: String,
        y: String,
        #[arg(long, value_enum, default_value = "hamming")]
        metric: Metric,
        /// Window lengths, comma separated and increasing.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        ell: Vec<usize>,
        /// Largest offset; defaults to 4·ell for each window.
        #[arg(long = "K")]
        max_offset: Option<usize>,
        /// Estimate between F(x) and F(y) for this rule file.
        #[arg(long)]
        rule: Option<PathBuf>,
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Constants and both well-definedness verdicts of a rule, as JSON.
    Classify {
        rulefile: PathBuf,
        /// Window lengths for the sliding Levenshtein semi-test.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        budget: Vec<usize>,
    },
    /// Witness words for the failure of uniformity or diamond-uniformity.
    Witness {
        rulefile: PathBuf,
        #[arg(long, value_enum, default_value = "weyl-l")]
        space: SpaceArg,
        #[arg(long)]
        json: bool,
    },
    /// Seeded property suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of sampled rules for rule-based suites.
        #[arg(long, default_value_t = 100)]
        n_rules: usize,
    },
    /// Recompute a named worked example and compare with its stated values.
    Reproduce {
        id: String,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long = "K")]
        max_offset: Option<usize>,
        #[arg(long)]
        budget: Option<usize>,
        /// Scan every offset rather than jumping to the computed one.
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Hamming,
    Levenshtein,
    Cantor,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    WeylH,
    WeylL,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Distances,
    Dillmaps,
    Pseudometrics,
    Theorems,
    All,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Letters of configuration arguments, ignoring the DSL syntax.
fn dsl_letters(text: &str) -> String {
    let body = match text.split_once(':') {
        Some(("ramp", _)) => return "01".to_string(),
        Some((_, body)) => body,
        None => text,
    };
    body.chars().filter(|c| !matches!(c, '|' | '!')).collect()
}

fn alphabet_for(explicit: Option<&str>, texts: &[&str]) -> Result<Alphabet> {
    match explicit {
        Some(s) => Ok(Alphabet::new(s)?),
        None => {
            let letters: Vec<String> = texts.iter().map(|t| dsl_letters(t)).collect();
            let a = Alphabet::inferred(letters.iter().map(String::as_str))
                .context("cannot infer an alphabet; pass --alphabet")?;
            Ok(a)
        }
    }
}

/// Bare forms: `p|q` is `evp:p|q`, `u!c` is `word:u!c`, anything else `periodic:w`.
fn config(text: &str, a: &Alphabet) -> Result<ConfigGenerator> {
    let text = if text.contains(':') {
        text.to_string()
    } else if text.contains('|') {
        format!("evp:{text}")
    } else if text.contains('!') {
        format!("word:{text}")
    } else {
        format!("periodic:{text}")
    };
    ConfigGenerator::parse(&text, a).with_context(|| format!("configuration `{text}`"))
}

fn load_rule(path: &Path) -> Result<RuleTable> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RuleTable::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Dist {
            u,
            v,
            metric,
            alphabet,
            budget,
        } => {
            let a = alphabet_for(alphabet.as_deref(), &[&u, &v])?;
            let out = match metric {
                Metric::Hamming => hamming(&a.parse_word(&u)?, &a.parse_word(&v)?)?.to_string(),
                Metric::Levenshtein => levenshtein(&a.parse_word(&u)?, &a.parse_word(&v)?).to_string(),
                Metric::Cantor => {
                    if budget == 0 {
                        bail!("--budget must be at least 1");
                    }
                    cantor(&config(&u, &a)?, &config(&v, &a)?, budget).to_string()
                }
            };
            println!("{out}");
        }
        Command::Pseudo {
            x,
            y,
            metric,
            ell,
            max_offset,
            rule,
            alphabet,
            json,
        } => {
            let base = match metric {
                Metric::Hamming => BaseDistance::Hamming,
                Metric::Levenshtein => BaseDistance::Levenshtein,
                Metric::Cantor => bail!("pseudo takes --metric hamming or levenshtein"),
            };
            let policy = max_offset.map_or(OffsetPolicy::default(), OffsetPolicy::Fixed);
            let rule = rule.as_deref().map(load_rule).transpose()?;
            let a = match (&rule, alphabet) {
                (Some(f), None) => f.alphabet().clone(),
                (_, explicit) => alphabet_for(explicit.as_deref(), &[&x, &y])?,
            };
            let (cx, cy) = (config(&x, &a)?, config(&y, &a)?);
            let report = match &rule {
                Some(f) => weyl_ladder::<Rational>(base, &f.apply(&cx), &f.apply(&cy), &ell, &policy)?,
                None => weyl_ladder::<Rational>(base, &cx, &cy, &ell, &policy)?,
            };
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_tsv());
                println!("# {}", report.disclaimer);
            }
        }
        Command::Classify { rulefile, budget } => {
            let f = load_rule(&rulefile)?;
            let budget = SamplingBudget {
                windows: budget,
                ..Default::default()
            };
            if budget.windows.is_empty() || budget.windows[0] == 0 || budget.windows.windows(2).any(|w| w[0] >= w[1]) {
                bail!("--budget must be increasing positive window lengths");
            }
            println!("{}", classify(&f, &budget).to_json());
        }
        Command::Witness { rulefile, space, json } => {
            let f = load_rule(&rulefile)?;
            let a = f.alphabet();
            let doc = match space {
                SpaceArg::WeylL => match decide_diamond_uniform(&f) {
                    DiamondUniformity::DiamondUniform { mean } => {
                        json!({ "space": "weyl-l", "witness": null, "reason": format!("diamond-uniform, cycle mean {}", ratio_text(&mean)) })
                    }
                    DiamondUniformity::NotDiamondUniform {
                        min_mean,
                        min_cycle,
                        max_mean,
                        max_cycle,
                    } => {
                        let w = witness_pair(&f, &min_cycle, &max_cycle)?;
                        json!({
                            "space": "weyl-l",
                            "cycle_means": [ratio_text(&min_mean), ratio_text(&max_mean)],
                            "witness": { "u": a.render(&w.u), "v": a.render(&w.v), "alpha": w.alpha, "overlap": w.overlap },
                            "verified": w.verify(&f),
                        })
                    }
                },
                SpaceArg::WeylH => match verdict_weyl_h(&f).outcome {
                    Outcome::NotWellDefinedH(e) => json!({
                        "space": "weyl-h",
                        "witness": { "u": a.render(&e.u), "v": a.render(&e.v), "alpha": e.alpha },
                        "x": e.x.to_dsl(a),
                        "y": e.y.to_dsl(a),
                        "agree_from": e.agree_from,
                        "image_density": ratio_text(&e.image_density()),
                    }),
                    _ => json!({ "space": "weyl-h", "witness": null, "reason": "uniform or constant" }),
                },
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else if doc["witness"].is_null() {
                println!("no witness: {}", doc["reason"].as_str().unwrap_or_default());
            } else {
                let w = &doc["witness"];
                println!("u\t{}", w["u"].as_str().unwrap_or_default());
                println!("v\t{}", w["v"].as_str().unwrap_or_default());
                println!("alpha\t{}", w["alpha"]);
                if let (Some(x), Some(y)) = (doc["x"].as_str(), doc["y"].as_str()) {
                    println!("x\t{x}\ny\t{y}");
                }
            }
        }
        Command::Verify { suite, seed, n_rules } => {
            let reports = match suite {
                Suite::Distances => vec![suite_distances(seed)],
                Suite::Dillmaps => vec![suite_dillmaps(seed, n_rules)],
                Suite::Pseudometrics => vec![suite_pseudometrics(seed)],
                Suite::Theorems => vec![suite_theorems(seed, n_rules)],
                Suite::All => vec![
                    suite_distances(seed),
                    suite_dillmaps(seed, n_rules),
                    suite_pseudometrics(seed),
                    suite_theorems(seed, n_rules),
                ],
            };
            for r in &reports {
                print!("{}", r.render());
            }
            return Ok(reports.iter().all(|r| r.passed()));
        }
        Command::Reproduce {
            id,
            ell,
            max_offset,
            budget,
            scan,
            seed,
            json,
        } => {
            let params = ReproduceParams {
                ell,
                max_offset,
                budget,
                scan,
                seed,
            };
            if ell == Some(0) {
                bail!("--ell must be at least 1");
            }
            let report = reproduce::run(&id, &params)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render());
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}
