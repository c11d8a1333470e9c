//! JSON document summarizing a rule: constants, cycle means, both verdicts and their evidence.

use serde::Serialize;

use super::graph::DeBruijnGraph;
use super::lipschitz::lipschitz_constant;
use super::{
    delta_norms, length_defect_bound, verdict_weyl_h, verdict_weyl_l, DeltaNorms, Outcome, SamplingBudget, Space,
    Verdict, WellDefinedReason, Witness,
};
use crate::dillmaps::{Norms, RuleTable};
use crate::pseudometrics::{LadderReport, SlidingEstimate};
use crate::scalar::ratio_text;
use crate::words::Alphabet;
use crate::Rational;

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub digest: String,
    pub alphabet: String,
    pub diameter: usize,
    pub norms: Norms,
    pub delta_norms: Option<DeltaNorms>,
    pub cycle_means: CycleMeans,
    pub length_defect_bound: Option<u64>,
    pub lipschitz: LipschitzConstants,
    pub weyl_h: VerdictDoc,
    pub weyl_l: VerdictDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleMeans {
    pub min: String,
    pub max: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzConstants {
    pub weyl_h: Option<String>,
    pub weyl_l: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictDoc {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairDoc>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub margins: Vec<EstimateRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separating: Option<SeparatingDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessDoc {
    pub u: String,
    pub v: String,
    pub alpha: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDoc {
    pub x: String,
    pub y: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree_from: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_density: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateRow {
    pub pair: String,
    pub ell: usize,
    #[serde(rename = "K")]
    pub max_offset: usize,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparatingDoc {
    pub z_block: String,
    pub w_block: String,
    pub ell: usize,
    pub input_k: usize,
    pub input_value: String,
    pub image_k: usize,
    pub image_value: String,
}

fn witness_doc(a: &Alphabet, w: &Witness) -> WitnessDoc {
    WitnessDoc {
        u: a.render(&w.u),
        v: a.render(&w.v),
        alpha: w.alpha,
    }
}

fn rows(label: &str, ladder: &LadderReport<Rational>) -> Vec<EstimateRow> {
    ladder.entries.iter().map(|e| row(label, e)).collect()
}

fn row(label: &str, e: &SlidingEstimate<Rational>) -> EstimateRow {
    EstimateRow {
        pair: label.to_string(),
        ell: e.window,
        max_offset: e.max_offset,
        value: ratio_text(&e.value),
    }
}

fn empty(verdict: &'static str) -> VerdictDoc {
    VerdictDoc {
        verdict,
        reason: None,
        witness: None,
        pair: None,
        margins: Vec::new(),
        separating: None,
        note: None,
    }
}

fn verdict_doc(a: &Alphabet, v: &Verdict) -> VerdictDoc {
    let mut doc = empty(v.label());
    match &v.outcome {
        Outcome::WellDefined(reason) => {
            doc.reason = Some(match reason {
                WellDefinedReason::Uniform => "uniform".to_string(),
                WellDefinedReason::Constant { period } => format!("constant {}^inf", a.render(period)),
                WellDefinedReason::DiamondUniform { mean } => format!("diamond-uniform, mean {}", ratio_text(mean)),
            })
        }
        Outcome::NotWellDefinedH(e) => {
            doc.reason = Some("neither uniform nor constant".to_string());
            doc.witness = Some(WitnessDoc {
                u: a.render(&e.u),
                v: a.render(&e.v),
                alpha: e.alpha as i64,
            });
            doc.pair = Some(PairDoc {
                x: e.x.to_dsl(a),
                y: e.y.to_dsl(a),
                agree_from: Some(e.agree_from),
                image_density: Some(ratio_text(&e.image_density())),
            });
        }
        Outcome::NotWellDefinedL(e) => {
            doc.reason = Some("not diamond-uniform; sampled images stay apart".to_string());
            doc.witness = Some(witness_doc(a, &e.witness));
            let (x, y) = (e.x.to_dsl(a), e.y.to_dsl(a));
            doc.margins = rows(&format!("F({x}), F({y})"), &e.image_ladder);
            doc.pair = Some(PairDoc {
                x,
                y,
                agree_from: None,
                image_density: None,
            });
            let s = &e.separating;
            doc.separating = Some(SeparatingDoc {
                z_block: a.render(&e.witness.u),
                w_block: a.render(&e.witness.v),
                ell: s.window,
                input_k: s.input.max_offset,
                input_value: ratio_text(&s.input.value),
                image_k: s.image.max_offset,
                image_value: ratio_text(&s.image.value),
            });
            doc.note = Some(crate::pseudometrics::TRUNCATION_NOTE);
        }
        Outcome::Unknown { witness, samples } => {
            doc.reason = Some("not diamond-uniform; no sampled pair separates at this budget".to_string());
            doc.witness = Some(witness_doc(a, witness));
            for s in samples {
                let label = format!("F({}), F({})", s.x.to_dsl(a), s.y.to_dsl(a));
                doc.margins.extend(rows(&label, &s.image_ladder));
            }
            doc.note = Some(crate::pseudometrics::TRUNCATION_NOTE);
        }
    }
    doc
}

pub fn classify(f: &RuleTable, budget: &SamplingBudget) -> ClassificationReport {
    let a = f.alphabet();
    let g = DeBruijnGraph::from_rule(f);
    let constant = |space| lipschitz_constant(f, space).ok().map(|r| ratio_text(&r));
    ClassificationReport {
        digest: f.digest(),
        alphabet: a.to_string(),
        diameter: f.diameter(),
        norms: f.norms(),
        delta_norms: delta_norms(f).ok(),
        cycle_means: CycleMeans {
            min: ratio_text(&g.min_mean_cycle().0),
            max: ratio_text(&g.max_mean_cycle().0),
        },
        length_defect_bound: length_defect_bound(f).ok(),
        lipschitz: LipschitzConstants {
            weyl_h: constant(Space::WeylH),
            weyl_l: constant(Space::WeylL),
        },
        weyl_h: verdict_doc(a, &verdict_weyl_h(f)),
        weyl_l: verdict_doc(a, &verdict_weyl_l(f, budget)),
    }
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
