//! CSV readers and writers for every table the pipeline produces.
//!
//! Floats are written with 17 significant digits so files round-trip exactly.

use std::io::{Read, Write};

use crate::bifurcation::codim2::TwoParamCurve;
use crate::bifurcation::{BifPoint, Branch};
use crate::equilibria::Equilibrium;
use crate::error::{Error, Result};
use crate::gpr::Resampled;
use crate::select::ModelScore;
use crate::sindy::{CandidateLibrary, GridModel, Hyper, SparseModel};
use crate::timeseries::RawSeries;

/// `x` with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Read a `year,elk,wolf` table; empty cells are missing values.
pub fn read_population_csv<R: Read>(reader: R) -> Result<(RawSeries, RawSeries)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?.clone();
    let names: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    if names != ["year", "elk", "wolf"] {
        return Err(Error::Parse { line: 1, msg: format!("expected header year,elk,wolf, got {}", names.join(",")) });
    }
    let mut years = Vec::new();
    let mut elk = Vec::new();
    let mut wolf = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        if rec.len() != 3 {
            return Err(Error::Parse { line, msg: format!("expected 3 fields, got {}", rec.len()) });
        }
        let field = |k: usize| -> Result<Option<f64>> {
            let s = &rec[k];
            if s.is_empty() {
                return Ok(None);
            }
            s.parse::<f64>()
                .map(Some)
                .map_err(|e| Error::Parse { line, msg: format!("'{s}': {e}") })
        };
        years.push(field(0)?.ok_or(Error::Parse { line, msg: "missing year".into() })?);
        elk.push(field(1)?);
        wolf.push(field(2)?);
    }
    Ok((RawSeries::counts("elk", years.clone(), elk)?, RawSeries::counts("wolf", years, wolf)?))
}

pub fn write_population_csv<W: Write>(mut w: W, elk: &RawSeries, wolf: &RawSeries) -> Result<()> {
    if elk.times != wolf.times {
        return Err(Error::InvalidInput("elk and wolf series have different years".into()));
    }
    writeln!(w, "year,elk,wolf")?;
    for i in 0..elk.len() {
        writeln!(w, "{},{},{}", elk.times[i], opt(elk.values[i]), opt(wolf.values[i]))?;
    }
    Ok(())
}

/// `t,e,w` rows.
pub fn write_states_csv<W: Write>(mut w: W, times: &[f64], e: &[f64], wv: &[f64]) -> Result<()> {
    writeln!(w, "t,e,w")?;
    for i in 0..times.len() {
        writeln!(w, "{},{},{}", num(times[i]), num(e[i]), num(wv[i]))?;
    }
    Ok(())
}

/// Parse any CSV with a header and only numeric cells into columns.
pub fn read_numeric_csv<R: Read>(reader: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        for (k, c) in cols.iter_mut().enumerate() {
            let s = rec.get(k).ok_or(Error::Parse { line, msg: "short row".into() })?;
            c.push(s.parse::<f64>().map_err(|e| Error::Parse { line, msg: format!("'{s}': {e}") })?);
        }
    }
    Ok((header, cols))
}

/// Read a `t,e,w` table.
pub fn read_states_csv<R: Read>(reader: R) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (header, mut cols) = read_numeric_csv(reader)?;
    if header != ["t", "e", "w"] {
        return Err(Error::Parse { line: 1, msg: format!("expected header t,e,w, got {}", header.join(",")) });
    }
    let w = cols.pop().unwrap();
    let e = cols.pop().unwrap();
    Ok((cols.pop().unwrap(), e, w))
}

/// `t,mean_e,var_e,mean_w,var_w` rows; both series must share the grid.
pub fn write_smoothed_csv<W: Write>(mut w: W, elk: &Resampled, wolf: &Resampled) -> Result<()> {
    if elk.times != wolf.times {
        return Err(Error::InvalidInput("smoothed series use different grids".into()));
    }
    writeln!(w, "t,mean_e,var_e,mean_w,var_w")?;
    for i in 0..elk.times.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            num(elk.times[i]),
            num(elk.mean[i]),
            num(elk.variance[i]),
            num(wolf.mean[i]),
            num(wolf.variance[i])
        )?;
    }
    Ok(())
}

/// `term,coeff_edot,coeff_wdot,inclusion_e,inclusion_w`, one row per library term.
pub fn write_model_csv<W: Write>(mut w: W, m: &SparseModel) -> Result<()> {
    writeln!(w, "term,coeff_edot,coeff_wdot,inclusion_e,inclusion_w")?;
    for (j, name) in m.library.names.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{}",
            name,
            num(m.coeffs[0][j]),
            num(m.coeffs[1][j]),
            num(m.inclusion[0][j]),
            num(m.inclusion[1][j])
        )?;
    }
    Ok(())
}

/// Inverse of [`write_model_csv`]. Terms must be monomials of the cubic library.
pub fn read_model_csv<R: Read>(reader: R) -> Result<SparseModel> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let lib = CandidateLibrary::cubic();
    let mut coeffs = [vec![0.0; lib.len()], vec![0.0; lib.len()]];
    let mut inclusion = [vec![0.0; lib.len()], vec![0.0; lib.len()]];
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        let j = lib
            .names
            .iter()
            .position(|n| n == &rec[0])
            .ok_or_else(|| Error::Parse { line, msg: format!("unknown term '{}'", &rec[0]) })?;
        let f = |k: usize| -> Result<f64> {
            rec.get(k)
                .unwrap_or("")
                .parse::<f64>()
                .map_err(|e| Error::Parse { line, msg: e.to_string() })
        };
        coeffs[0][j] = f(1)?;
        coeffs[1][j] = f(2)?;
        inclusion[0][j] = f(3)?;
        inclusion[1][j] = f(4)?;
    }
    let hyper = Hyper { alpha: 0.0, lambda: f64::MIN_POSITIVE, n_models: 1, subsample_fraction: 1.0 };
    let mut m = SparseModel::from_coeffs(lib, coeffs, hyper);
    m.inclusion = inclusion;
    Ok(m)
}

/// `model_id,alpha,lambda,n_models,fraction,k,sse`; the hyperparameters are
/// those of the first grid cell that produced each model.
pub fn write_grid_report<W: Write>(mut w: W, models: &[GridModel]) -> Result<()> {
    writeln!(w, "model_id,alpha,lambda,n_models,fraction,k,sse")?;
    for g in models {
        let h = g.runs[0];
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            g.id,
            h.alpha,
            h.lambda,
            h.n_models,
            h.subsample_fraction,
            g.model.k(),
            num(g.model.sse)
        )?;
    }
    Ok(())
}

/// `model,k,sse,aic,bic`.
pub fn write_scores_csv<W: Write>(mut w: W, scores: &[ModelScore]) -> Result<()> {
    writeln!(w, "model,k,sse,aic,bic")?;
    for s in scores {
        writeln!(w, "{},{},{},{},{}", s.model_id, s.k, num(s.sse), num(s.aic), num(s.bic))?;
    }
    Ok(())
}

/// `e,w,re_l1,im_l1,re_l2,im_l2,kind`.
pub fn write_equilibria_csv<W: Write>(mut w: W, eqs: &[Equilibrium]) -> Result<()> {
    writeln!(w, "e,w,re_l1,im_l1,re_l2,im_l2,kind")?;
    for q in eqs {
        let [a, b] = q.eigenvalues;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            num(q.e),
            num(q.w),
            num(a.re),
            num(a.im),
            num(b.re),
            num(b.im),
            q.kind.name()
        )?;
    }
    Ok(())
}

/// `param,e,w,re_l1,im_l1,re_l2,im_l2,stable`, branches one after another.
pub fn write_branch_csv<W: Write>(mut w: W, branches: &[Branch]) -> Result<()> {
    writeln!(w, "param,e,w,re_l1,im_l1,re_l2,im_l2,stable")?;
    for b in branches {
        for p in &b.points {
            let [l1, l2] = p.eigenvalues;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                num(p.param),
                num(p.e),
                num(p.w),
                num(l1.re),
                num(l1.im),
                num(l2.re),
                num(l2.im),
                u8::from(p.stable)
            )?;
        }
    }
    Ok(())
}

/// `kind,param1,param2,e,w,l1`; `param2` and `l1` are empty where undefined.
pub fn write_special_points_csv<W: Write>(mut w: W, pts: &[BifPoint]) -> Result<()> {
    writeln!(w, "kind,param1,param2,e,w,l1")?;
    for p in pts {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.kind.name(),
            opt(p.param_values.first().copied()),
            opt(p.param_values.get(1).copied()),
            num(p.state[0]),
            num(p.state[1]),
            opt(p.lyapunov_l1)
        )?;
    }
    Ok(())
}

/// `param_x,param_y,kind` for every point of every curve.
pub fn write_two_param_csv<W: Write>(mut w: W, curves: &[TwoParamCurve]) -> Result<()> {
    writeln!(w, "param_x,param_y,kind")?;
    for c in curves {
        for (p, k) in c.points.iter().zip(&c.point_kinds) {
            writeln!(w, "{},{},{}", num(p[0]), num(p[1]), k.name())?;
        }
    }
    Ok(())
}
