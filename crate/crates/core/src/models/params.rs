use serde::{Deserialize, Serialize};

use super::{build_model_i, build_model_ii, build_model_iii, FridgeModel, ModelTag};
use crate::error::{FridgeError, Result};

/// Model I parameters. `tc` is the bath of the cooled qubit, `tr` the bath of
/// the sink qubit; the engine qubit's gap is `e2 - e1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelIParams {
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "Tc")]
    pub tc: f64,
    #[serde(rename = "Tr")]
    pub tr: f64,
    #[serde(rename = "Th")]
    pub th: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelIIParams {
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "Tc")]
    pub tc: f64,
    #[serde(rename = "Th")]
    pub th: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub g: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelIIIParams {
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "Tc")]
    pub tc: f64,
    #[serde(rename = "Tr")]
    pub tr: f64,
    #[serde(rename = "Th")]
    pub th: f64,
    pub p1: f64,
    pub ph: f64,
    pub pr: f64,
    pub g: f64,
}

/// Named physical parameters of one of the three built-in models.
///
/// Besides the stored fields, a few derived names are accepted by
/// [`get`](Self::get) and [`set`](Self::set): `E3` (Model I, engine gap
/// `E2 - E1`), `E` (Model II, sets `E1 = E2`) and `p` (all bath rates at once).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ModelParams {
    I(ModelIParams),
    II(ModelIIParams),
    III(ModelIIIParams),
}

impl ModelParams {
    pub fn tag(&self) -> ModelTag {
        match self {
            ModelParams::I(_) => ModelTag::I,
            ModelParams::II(_) => ModelTag::II,
            ModelParams::III(_) => ModelTag::III,
        }
    }

    pub fn build(&self) -> Result<FridgeModel> {
        match self {
            ModelParams::I(p) => build_model_i(p),
            ModelParams::II(p) => build_model_ii(p),
            ModelParams::III(p) => build_model_iii(p),
        }
    }

    /// Stored parameters in canonical order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        match *self {
            ModelParams::I(p) => vec![
                ("E1", p.e1),
                ("E2", p.e2),
                ("Tc", p.tc),
                ("Tr", p.tr),
                ("Th", p.th),
                ("p1", p.p1),
                ("p2", p.p2),
                ("p3", p.p3),
                ("g", p.g),
            ],
            ModelParams::II(p) => vec![
                ("E1", p.e1),
                ("E2", p.e2),
                ("Tc", p.tc),
                ("Th", p.th),
                ("p1", p.p1),
                ("p2", p.p2),
                ("p3", p.p3),
                ("g", p.g),
                ("h", p.h),
            ],
            ModelParams::III(p) => vec![
                ("E1", p.e1),
                ("E2", p.e2),
                ("Tc", p.tc),
                ("Tr", p.tr),
                ("Th", p.th),
                ("p1", p.p1),
                ("ph", p.ph),
                ("pr", p.pr),
                ("g", p.g),
            ],
        }
    }

    fn rates(&self) -> [f64; 3] {
        match *self {
            ModelParams::I(p) => [p.p1, p.p2, p.p3],
            ModelParams::II(p) => [p.p1, p.p2, p.p3],
            ModelParams::III(p) => [p.p1, p.ph, p.pr],
        }
    }

    /// Bath temperature of the cooled particle.
    pub fn cold_bath(&self) -> f64 {
        match *self {
            ModelParams::I(p) => p.tc,
            ModelParams::II(p) => p.tc,
            ModelParams::III(p) => p.tc,
        }
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        match (self, name) {
            (ModelParams::I(p), "E3") => return Ok(p.e2 - p.e1),
            (ModelParams::II(p), "E") if p.e1 == p.e2 => return Ok(p.e1),
            (_, "p") => {
                let r = self.rates();
                return if r.iter().all(|&x| x == r[0]) {
                    Ok(r[0])
                } else {
                    Err(FridgeError::InvalidParameter {
                        name: "p".into(),
                        reason: "bath rates differ; read them individually".into(),
                    })
                };
            }
            _ => {}
        }
        self.entries()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| self.unknown(name))
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let tag = self.tag();
        let slot: &mut f64 = match (self, name) {
            (ModelParams::I(p), "E3") => {
                p.e2 = p.e1 + value;
                return Ok(());
            }
            (ModelParams::II(p), "E") => {
                p.e1 = value;
                p.e2 = value;
                return Ok(());
            }
            (ModelParams::I(p), "p") => {
                (p.p1, p.p2, p.p3) = (value, value, value);
                return Ok(());
            }
            (ModelParams::II(p), "p") => {
                (p.p1, p.p2, p.p3) = (value, value, value);
                return Ok(());
            }
            (ModelParams::III(p), "p") => {
                (p.p1, p.ph, p.pr) = (value, value, value);
                return Ok(());
            }
            (ModelParams::I(p), n) => match n {
                "E1" => &mut p.e1,
                "E2" => &mut p.e2,
                "Tc" => &mut p.tc,
                "Tr" => &mut p.tr,
                "Th" => &mut p.th,
                "p1" => &mut p.p1,
                "p2" => &mut p.p2,
                "p3" => &mut p.p3,
                "g" => &mut p.g,
                _ => return Err(unknown(tag, name)),
            },
            (ModelParams::II(p), n) => match n {
                "E1" => &mut p.e1,
                "E2" => &mut p.e2,
                "Tc" => &mut p.tc,
                "Th" => &mut p.th,
                "p1" => &mut p.p1,
                "p2" => &mut p.p2,
                "p3" => &mut p.p3,
                "g" => &mut p.g,
                "h" => &mut p.h,
                _ => return Err(unknown(tag, name)),
            },
            (ModelParams::III(p), n) => match n {
                "E1" => &mut p.e1,
                "E2" => &mut p.e2,
                "Tc" => &mut p.tc,
                "Tr" => &mut p.tr,
                "Th" => &mut p.th,
                "p1" => &mut p.p1,
                "ph" => &mut p.ph,
                "pr" => &mut p.pr,
                "g" => &mut p.g,
                _ => return Err(unknown(tag, name)),
            },
        };
        *slot = value;
        Ok(())
    }

    /// Whether `name` is accepted by [`set`](Self::set).
    pub fn accepts(&self, name: &str) -> bool {
        let mut probe = *self;
        probe.set(name, 1.0).is_ok()
    }

    fn unknown(&self, name: &str) -> FridgeError {
        unknown(self.tag(), name)
    }
}

fn unknown(tag: ModelTag, name: &str) -> FridgeError {
    FridgeError::UnknownParameter {
        name: name.into(),
        model: tag.to_string(),
    }
}
