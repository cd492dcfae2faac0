//! JSON form of a threshold report. An undefined threshold becomes
//! `{"value": null, "error": "..."}` rather than failing the whole report.

use chemolab_core::constants::{Threshold, ThresholdReport};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdJson {
    pub value: Option<f64>,
    pub error: Option<String>,
}

impl From<&Threshold> for ThresholdJson {
    fn from(t: &Threshold) -> Self {
        match t {
            Ok(v) => ThresholdJson { value: Some(*v), error: None },
            Err(e) => ThresholdJson { value: None, error: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mu1Json {
    pub p: f64,
    #[serde(flatten)]
    pub threshold: ThresholdJson,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchMinJson {
    pub value: f64,
    pub branch: &'static str,
    pub first: f64,
    pub second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuTildeJson {
    pub value: f64,
    pub branch: &'static str,
    pub margin: f64,
    pub decaying: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlagsJson {
    pub above_mu1: Option<bool>,
    pub above_mu2: Option<bool>,
    pub above_mu3: Option<bool>,
    pub above_mu3_mu4: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportJson {
    pub n_dim: u32,
    pub q: f64,
    pub eta: f64,
    pub area: f64,
    pub diam: f64,
    pub delta0: f64,
    pub mu1_star: Vec<Mu1Json>,
    pub mu2_star: ThresholdJson,
    pub mu3_star: ThresholdJson,
    pub mu4_star: BranchMinJson,
    pub mu_tilde: MuTildeJson,
    pub v_floor_eta: f64,
    pub rate_energy: f64,
    pub rate_sup: f64,
    pub flags: FlagsJson,
}

impl From<&ThresholdReport> for ReportJson {
    fn from(r: &ThresholdReport) -> Self {
        ReportJson {
            n_dim: r.n_dim,
            q: r.q,
            eta: r.eta,
            area: r.area,
            diam: r.diam,
            delta0: r.delta0,
            mu1_star: r.mu1.iter().map(|(p, t)| Mu1Json { p: *p, threshold: t.into() }).collect(),
            mu2_star: (&r.mu2).into(),
            mu3_star: (&r.mu3).into(),
            mu4_star: BranchMinJson {
                value: r.mu4.value,
                branch: r.mu4.branch.as_str(),
                first: r.mu4.first,
                second: r.mu4.second,
            },
            mu_tilde: MuTildeJson {
                value: r.mu_tilde.value,
                branch: r.mu_tilde.branch.as_str(),
                margin: r.mu_tilde.margin,
                decaying: r.mu_tilde.is_decaying(),
            },
            v_floor_eta: r.v_floor_eta,
            rate_energy: r.rate_energy,
            rate_sup: r.rate_sup,
            flags: FlagsJson {
                above_mu1: r.flags.above_mu1,
                above_mu2: r.flags.above_mu2,
                above_mu3: r.flags.above_mu3,
                above_mu3_mu4: r.flags.above_mu3_mu4,
            },
        }
    }
}
