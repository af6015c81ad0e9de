//! Potential documents: TOML tables with a `kind` discriminator.

use std::path::Path;

use scatterbound::model::{Mobius, NamedPotential, SampledProfile, TietzDenominator};
use scatterbound::{Perturbation, PotentialSpec};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialDoc {
    Free {
        #[serde(default)]
        v_inf: f64,
    },
    Step {
        v_minus: f64,
        v_plus: f64,
    },
    Delta {
        g: f64,
        #[serde(default)]
        x0: f64,
    },
    DoubleDelta {
        g: f64,
        d: f64,
    },
    SquareBarrier {
        v0: f64,
        width: f64,
    },
    AsymSquareWell {
        v1: f64,
        v2: f64,
        v3: f64,
        a: f64,
        b: f64,
    },
    Tanh {
        v_minus: f64,
        v_plus: f64,
        length: f64,
    },
    Sech2 {
        ve: f64,
        length: f64,
    },
    PoschlTeller {
        v0: f64,
        #[serde(default)]
        v_inf: f64,
        length: f64,
    },
    Mobius {
        v0: f64,
        v1: f64,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        length: f64,
    },
    Eckart {
        a_coef: f64,
        b_coef: f64,
        a: f64,
    },
    RosenMorse {
        b: f64,
        c: f64,
        d: f64,
    },
    Morse {
        v0: f64,
        #[serde(default)]
        x0: f64,
        a: f64,
    },
    ManningRosen {
        b: f64,
        c: f64,
        d: f64,
    },
    Hulthen {
        v0: f64,
        a: f64,
    },
    Tietz {
        v0: f64,
        #[serde(default)]
        x0: f64,
        a: f64,
        denominator: Denominator,
    },
    Hua {
        v0: f64,
        q: f64,
        a: f64,
    },
    Sampled {
        xs: Vec<f64>,
        vs: Vec<f64>,
        v_minus: f64,
        v_plus: f64,
    },
    Shifted {
        base: Box<PotentialDoc>,
        eps: f64,
        dv: PerturbationDoc,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    Sinh,
    Cosh,
    Exp,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum PerturbationDoc {
    Gaussian { amplitude: f64, centre: f64, width: f64 },
    Boxcar { height: f64, a: f64, b: f64 },
}

impl PerturbationDoc {
    fn to_perturbation(&self) -> Perturbation {
        match *self {
            PerturbationDoc::Gaussian { amplitude, centre, width } => Perturbation::gaussian(amplitude, centre, width),
            PerturbationDoc::Boxcar { height, a, b } => Perturbation::boxcar(height, a, b),
        }
    }
}

impl PotentialDoc {
    pub fn to_spec(&self) -> Result<PotentialSpec, CliError> {
        use PotentialDoc as D;
        let named = |n: NamedPotential| Ok(PotentialSpec::Named(n));
        match self.clone() {
            D::Free { v_inf } => Ok(PotentialSpec::Free { v_inf }),
            D::Step { v_minus, v_plus } => Ok(PotentialSpec::Step { v_minus, v_plus }),
            D::Delta { g, x0 } => Ok(PotentialSpec::Delta { g, x0 }),
            D::DoubleDelta { g, d } => Ok(PotentialSpec::DoubleDelta { g, d }),
            D::SquareBarrier { v0, width } => Ok(PotentialSpec::SquareBarrier { v0, width }),
            D::AsymSquareWell { v1, v2, v3, a, b } => Ok(PotentialSpec::AsymSquareWell { v1, v2, v3, a, b }),
            D::Tanh { v_minus, v_plus, length } => Ok(PotentialSpec::Tanh { v_minus, v_plus, length }),
            D::Sech2 { ve, length } => Ok(PotentialSpec::Sech2 { ve, length }),
            D::PoschlTeller { v0, v_inf, length } => Ok(PotentialSpec::PoschlTeller { v0, v_inf, length }),
            D::Mobius { v0, v1, a, b, c, d, length } => {
                Ok(PotentialSpec::Mobius(Mobius { v0, v1, a, b, c, d, length }))
            }
            D::Eckart { a_coef, b_coef, a } => named(NamedPotential::Eckart { a_coef, b_coef, a }),
            D::RosenMorse { b, c, d } => named(NamedPotential::RosenMorse { b, c, d }),
            D::Morse { v0, x0, a } => named(NamedPotential::Morse { v0, x0, a }),
            D::ManningRosen { b, c, d } => named(NamedPotential::ManningRosen { b, c, d }),
            D::Hulthen { v0, a } => named(NamedPotential::Hulthen { v0, a }),
            D::Tietz { v0, x0, a, denominator } => {
                let denominator = match denominator {
                    Denominator::Sinh => TietzDenominator::Sinh,
                    Denominator::Cosh => TietzDenominator::Cosh,
                    Denominator::Exp => TietzDenominator::Exp,
                };
                named(NamedPotential::Tietz { v0, x0, a, denominator })
            }
            D::Hua { v0, q, a } => named(NamedPotential::Hua { v0, q, a }),
            D::Sampled { xs, vs, v_minus, v_plus } => {
                Ok(PotentialSpec::Sampled(SampledProfile::new(xs, vs, v_minus, v_plus)?))
            }
            D::Shifted { base, eps, dv } => {
                Ok(PotentialSpec::Shifted { base: Box::new(base.to_spec()?), eps, dv: dv.to_perturbation() })
            }
        }
    }
}

/// Reads a document from a file, or from an inline `key=value,key=value` list.
pub fn load_table(arg: &str) -> Result<toml::Table, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{arg}: {e}")))?;
        return text.parse::<toml::Table>().map_err(|e| CliError::Usage(format!("{arg}: {e}")));
    }
    if !arg.contains('=') {
        return Err(CliError::Usage(format!("{arg}: no such file and not an inline key=value list")));
    }
    let mut table = toml::Table::new();
    for pair in arg.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, raw) =
            pair.split_once('=').ok_or_else(|| CliError::Usage(format!("expected key=value, got `{pair}`")))?;
        let raw = raw.trim();
        let value = match raw.parse::<f64>() {
            Ok(v) => toml::Value::Float(v),
            Err(_) => toml::Value::String(raw.trim_matches(|c| c == '"' || c == '\'').to_string()),
        };
        table.insert(key.trim().to_string(), value);
    }
    Ok(table)
}

pub fn parse_table(table: &toml::Table) -> Result<PotentialSpec, CliError> {
    let doc: PotentialDoc = promote_integers(toml::Value::Table(table.clone()))
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Usage(format!("potential document: {}", e.message())))?;
    doc.to_spec()
}

pub fn load(arg: &str) -> Result<PotentialSpec, CliError> {
    parse_table(&load_table(arg)?)
}

/// TOML distinguishes `1` from `1.0`; every numeric parameter here is real.
fn promote_integers(v: toml::Value) -> toml::Value {
    match v {
        toml::Value::Integer(i) => toml::Value::Float(i as f64),
        toml::Value::Array(a) => toml::Value::Array(a.into_iter().map(promote_integers).collect()),
        toml::Value::Table(t) => toml::Value::Table(t.into_iter().map(|(k, v)| (k, promote_integers(v))).collect()),
        other => other,
    }
}
