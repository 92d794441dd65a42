use std::collections::BTreeMap;
use std::path::Path;

use crate::models::{
    dephasing_family, family_from_kraus, jc_family, load_tabulated_family, semigroup_dephasing_family,
    DephasingParams, JcParams, MapFamily,
};
use crate::{Error, Result};

/// Parse a repeated `KEY=VALUE` flag.
pub fn parse_param(raw: &str) -> std::result::Result<(String, f64), String> {
    let (key, value) = raw.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got '{raw}'"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(format!("empty parameter name in '{raw}'"));
    }
    let value: f64 = value.trim().parse().map_err(|_| format!("parameter {key}: '{value}' is not a number"))?;
    Ok((key.to_owned(), value))
}

fn collect(params: &[(String, f64)]) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for (k, v) in params {
        if map.insert(k.clone(), *v).is_some() {
            return Err(Error::Config(format!("parameter {k} given twice")));
        }
    }
    Ok(map)
}

fn take(map: &mut BTreeMap<String, f64>, model: &str, key: &str) -> Result<f64> {
    map.remove(key).ok_or_else(|| Error::Config(format!("model {model} needs --param {key}=VALUE")))
}

fn reject_rest(map: BTreeMap<String, f64>, model: &str) -> Result<()> {
    match map.keys().next() {
        Some(k) => Err(Error::Config(format!("model {model} has no parameter {k}"))),
        None => Ok(()),
    }
}

/// Build a family from `--model` and its `--param`s.
///
/// Models: `dephasing` (A, N), `jc` (gamma0, lambda), `semigroup` (gamma),
/// `file:PATH` and `kraus:PATH` (no parameters).
pub fn build_family(model: &str, params: &[(String, f64)]) -> Result<MapFamily> {
    let mut map = collect(params)?;
    let family = if let Some(path) = model.strip_prefix("file:") {
        load_tabulated_family(Path::new(path))?
    } else if let Some(path) = model.strip_prefix("kraus:") {
        family_from_kraus(Path::new(path))?
    } else {
        match model {
            "dephasing" => {
                let a = take(&mut map, model, "A")?;
                let n = take(&mut map, model, "N")?;
                if !(n >= 1.0 && n.fract() == 0.0 && n <= u32::MAX as f64) {
                    return Err(Error::Config(format!("N must be a positive integer, got {n}")));
                }
                dephasing_family(DephasingParams::new(a, n as u32)?)
            }
            "jc" => {
                let gamma0 = take(&mut map, model, "gamma0")?;
                let lambda = take(&mut map, model, "lambda")?;
                jc_family(JcParams::new(gamma0, lambda)?)
            }
            "semigroup" => semigroup_dephasing_family(take(&mut map, model, "gamma")?)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown model '{other}' (expected dephasing, jc, semigroup, file:PATH or kraus:PATH)"
                )))
            }
        }
    };
    reject_rest(map, model)?;
    Ok(family)
}
