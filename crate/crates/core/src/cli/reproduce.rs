use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;

use crate::divisibility::{find_singular_points, ScanConfig, SingularPoint};
use crate::measures::{non_markovianity, singularity_measure, MeasureConfig, NonMarkovConfig};
use crate::models::{dephasing_family, jc_family, DephasingParams, JcParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    Dephasing,
    Jc,
}

/// One comparison of a numeric result with its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub setting: String,
    pub quantity: String,
    pub numeric: f64,
    pub reference: f64,
    pub tol: f64,
}

impl Row {
    fn new(setting: &str, quantity: impl Into<String>, numeric: f64, reference: f64, tol: f64) -> Self {
        Self { setting: setting.to_owned(), quantity: quantity.into(), numeric, reference, tol }
    }

    pub fn passed(&self) -> bool {
        (self.numeric - self.reference).abs() <= self.tol
    }
}

fn nearest(points: &[SingularPoint], t: f64) -> Option<&SingularPoint> {
    points.iter().filter(|p| p.confirmed).min_by(|a, b| (a.t_c - t).abs().total_cmp(&(b.t_c - t).abs()))
}

fn confirmed_count(points: &[SingularPoint]) -> f64 {
    points.iter().filter(|p| p.confirmed).count() as f64
}

fn dephasing_rows() -> Result<Vec<Row>> {
    let setting = "dephasing N=4 A=1";
    let p = DephasingParams::new(1.0, 4)?;
    let family = dephasing_family(p);
    let nm = non_markovianity(&family, &NonMarkovConfig::new(10.0))?;
    let mut rows = vec![Row::new(setting, "singular points in [0,10]", confirmed_count(&nm.points), 3.0, 0.0)];
    for n in 0..3 {
        let exact = p.singular_time(n);
        let found = nearest(&nm.points, exact).map_or(f64::NAN, |q| q.t_c);
        rows.push(Row::new(setting, format!("t_c({n})"), found, exact, 1e-6));
        let s = nm.measures.iter().find(|m| m.t_c == found).map_or(f64::NAN, |m| m.value);
        rows.push(Row::new(setting, format!("S(t_c({n}))"), s, 0.5, 1e-3));
    }
    rows.push(Row::new(setting, "N_M", nm.total, 1.5, 5e-3));
    Ok(rows)
}

fn jc_rows() -> Result<Vec<Row>> {
    let mut rows = Vec::new();

    let setting = "jc gamma0=5 lambda=1";
    let p = JcParams::new(5.0, 1.0)?;
    let family = jc_family(p);
    let points = find_singular_points(&family, &ScanConfig::new(4.5))?;
    for n in 0..2 {
        let exact = p.singular_time(n).ok_or_else(|| Error::Numerical("no closed-form singular time".into()))?;
        let found = nearest(&points, exact).map_or(f64::NAN, |q| q.t_c);
        rows.push(Row::new(setting, format!("t_c({n})"), found, exact, 1e-6));
        if found.is_nan() {
            continue;
        }
        let revival = p.revival_time(n).expect("underdamped");
        let d33 = jc_d33(p, revival);
        let r = singularity_measure(&family, found, &MeasureConfig::with_default_window(&family, found)?)?;
        rows.push(Row::new(setting, format!("S(t_c({n}))"), r.value, 0.5 * (d33 / (1.0 - d33)).sqrt(), 1e-3));
        rows.push(Row::new(setting, format!("argmax_T({n})"), r.argmax_t, revival, 1e-3));
    }

    let setting = "jc gamma0=50 lambda=1";
    let p = JcParams::new(50.0, 1.0)?;
    let family = jc_family(p);
    let t_c = p.singular_time(0).expect("underdamped");
    let r = singularity_measure(&family, t_c, &MeasureConfig::with_default_window(&family, t_c)?)?;
    rows.push(Row::new(setting, "S(t_c(0))", r.value, jc_d33(p, p.revival_time(0).expect("underdamped")), 1e-3));

    let setting = "jc gamma0=0.2 lambda=1";
    let family = jc_family(JcParams::new(0.2, 1.0)?);
    let points = find_singular_points(&family, &ScanConfig::new(20.0))?;
    rows.push(Row::new(setting, "singular points in [0,20]", confirmed_count(&points), 0.0, 0.0));
    Ok(rows)
}

fn jc_d33(p: JcParams, t: f64) -> f64 {
    crate::models::jc_c(p, t).powi(2)
}

/// Comparison rows for one canonical case.
pub fn reproduce_case(case: Case) -> Result<Vec<Row>> {
    match case {
        Case::Dephasing => dephasing_rows(),
        Case::Jc => jc_rows(),
    }
}

pub(super) fn cmd_reproduce(case: Case, stdout: &mut dyn Write) -> Result<u8> {
    let rows = reproduce_case(case)?;
    let mut text = format!(
        "{:<24} {:<26} {:>14} {:>14} {:>8}  result\n",
        "setting", "quantity", "numeric", "reference", "tol"
    );
    for r in &rows {
        text.push_str(&format!(
            "{:<24} {:<26} {:>14.9} {:>14.9} {:>8.0e}  {}\n",
            r.setting,
            r.quantity,
            r.numeric,
            r.reference,
            r.tol,
            if r.passed() { "pass" } else { "FAIL" }
        ));
    }
    let failed = rows.iter().filter(|r| !r.passed()).count();
    text.push_str(&format!("{} of {} rows pass\n", rows.len() - failed, rows.len()));
    stdout
        .write_all(text.as_bytes())
        .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })?;
    Ok(if failed == 0 { 0 } else { 2 })
}
