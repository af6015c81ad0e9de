use rayon::prelude::*;
use scatterbound::comparison::{bracket_transmission, theta_bound};
use scatterbound::greybody::{greybody_bound_1, greybody_bound_2, greybody_numeric};
use scatterbound::registry::{self, BOUND_IDS};
use scatterbound::{
    build_dispersion, exact_amplitudes, solve_scattering, BoundKind, BoundResult, GreybodyQuery, PotentialSpec,
    QuadratureConfig, ReferenceSolution, SolverConfig, UnitsConvention,
};

use crate::doc;
use crate::error::CliError;
use crate::table::{Cell, Row, Table};

/// Numerical settings shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub solver: SolverConfig,
    pub quad: QuadratureConfig,
    pub units: UnitsConvention,
}

impl Settings {
    pub fn new(tol: Option<f64>) -> Result<Self, CliError> {
        let mut solver = SolverConfig::default();
        let mut quad = QuadratureConfig::default();
        if let Some(t) = tol {
            solver.rel_tol = t;
            solver.abs_tol = t * 1e-2;
            quad.rel_tol = t;
            quad.abs_tol = t;
        }
        solver.validate().map_err(|e| CliError::Usage(format!("--tol: {e}")))?;
        Ok(Self { solver, quad, units: UnitsConvention::default() })
    }
}

/// The rows of a table plus the first failure met, in grid order.
pub struct Output {
    pub table: Table,
    pub failure: Option<CliError>,
}

/// Evaluates `f` on every point in parallel and keeps the results in input order.
fn collect<T: Sync>(
    mut table: Table,
    points: &[T],
    f: impl Fn(&T) -> Result<Vec<Row>, CliError> + Sync + Send,
) -> Output {
    let results: Vec<_> = points.par_iter().map(f).collect();
    let mut failure = None;
    for r in results {
        match r {
            Ok(rows) => table.rows.extend(rows),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    Output { table, failure }
}

pub fn exact(p: &PotentialSpec, energies: &[f64], s: &Settings) -> Output {
    collect(Table::new(&["E", "T_exact", "R_exact"]), energies, |&e| {
        let a = exact_amplitudes(p, e, s.units)?;
        Ok(vec![vec![e.into(), a.transmission().into(), a.reflection().into()]])
    })
}

pub fn solve(p: &PotentialSpec, energies: &[f64], s: &Settings) -> Output {
    let columns = ["E", "T", "R", "abs_alpha", "abs_beta", "err_estimate", "status"];
    let runs: Vec<_> = energies
        .par_iter()
        .map(|&e| (e, build_dispersion(p, e, s.units).and_then(|d| solve_scattering(&d, &s.solver))))
        .collect();
    let mut table = Table::new(&columns);
    let mut failure = None;
    // failed points stay in the table, flagged; the exit code reports the first one
    for (e, run) in runs {
        table.rows.push(match run {
            Ok(r) => vec![
                e.into(),
                r.transmission.into(),
                r.reflection.into(),
                r.alpha.norm().into(),
                r.beta.norm().into(),
                r.err_estimate.into(),
                "ok".into(),
            ],
            Err(err) => {
                let mut row: Row = vec![e.into()];
                row.extend(std::iter::repeat(Cell::Num(f64::NAN)).take(5));
                row.push(format!("error: {err}").into());
                failure.get_or_insert(CliError::from(err));
                row
            }
        });
    }
    Output { table, failure }
}

/// Expands the `--bounds` argument; `None` means every applicable bound per point.
pub fn bound_selection(arg: &str) -> Result<Option<Vec<String>>, CliError> {
    if arg.trim() == "all" {
        return Ok(None);
    }
    let mut ids: Vec<String> = arg.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if ids.is_empty() {
        return Err(CliError::Usage("--bounds needs at least one id".into()));
    }
    if let Some(bad) = ids.iter().find(|id| !registry::is_known(id)) {
        return Err(CliError::Unsupported(format!("unknown bound id `{bad}`; known ids: {}", BOUND_IDS.join(", "))));
    }
    ids.sort();
    ids.dedup();
    Ok(Some(ids))
}

fn bound_row(e: f64, b: &BoundResult) -> Row {
    vec![
        e.into(),
        b.bound_id.clone().into(),
        b.kind.as_str().into(),
        b.value.into(),
        b.valid.into(),
        b.quad_err.into(),
        b.estimate.into(),
    ]
}

pub fn bound(p: &PotentialSpec, energies: &[f64], ids: Option<&[String]>, s: &Settings) -> Output {
    let columns = ["E", "boundId", "kind", "value", "valid", "quadErr", "estimate"];
    let mut out = collect(Table::new(&columns), energies, |&e| {
        let d = build_dispersion(p, e, s.units)?;
        let chosen: Vec<String> = match ids {
            Some(ids) => ids.to_vec(),
            None => registry::applicable(&d, &s.quad).into_iter().map(String::from).collect(),
        };
        let mut rows = Vec::new();
        for id in &chosen {
            rows.extend(registry::evaluate(id, &d, &s.quad)?.iter().map(|b| bound_row(e, b)));
        }
        Ok(rows)
    });
    // grid order already sorts by E; ids within a point are sorted and the sort is stable
    out.table.rows.sort_by(|a, b| cmp_key(a).partial_cmp(&cmp_key(b)).unwrap_or(std::cmp::Ordering::Equal));
    out
}

fn cmp_key(row: &Row) -> (f64, &str) {
    match (&row[0], &row[1]) {
        (Cell::Num(e), Cell::Text(id)) => (*e, id.as_str()),
        _ => (f64::NAN, ""),
    }
}

pub struct GreybodyArgs {
    pub mass: f64,
    pub spin: u32,
    pub ell: u32,
}

pub fn greybody(g: &GreybodyArgs, omegas: &[f64], s: &Settings) -> Output {
    collect(Table::new(&["omega", "bound1", "bound2", "T_numeric"]), omegas, |&w| {
        let q = GreybodyQuery::new(g.mass, g.spin, g.ell, w)?;
        let b1 = greybody_bound_1(&q)?;
        let b2 = greybody_bound_2(&q)?;
        let t = greybody_numeric(&q, &s.solver)?.result.transmission;
        let b2 = if b2.valid { b2.value } else { f64::NAN };
        Ok(vec![vec![w.into(), b1.value.into(), b2.into(), t.into()]])
    })
}

pub fn compare(reference: &PotentialSpec, target: &PotentialSpec, energies: &[f64], s: &Settings) -> Output {
    let columns = ["E", "lowerT", "upperT", "upperValid", "T_numeric", "theta", "theta0"];
    collect(Table::new(&columns), energies, |&e| {
        let r = ReferenceSolution::from_potential(reference, e, s.units)?;
        let d = build_dispersion(target, e, s.units)?;
        let budget = theta_bound(&r, &d, &s.quad)?;
        let (lo, hi) = bracket_transmission(&budget);
        let t = solve_scattering(&d, &s.solver)?.transmission;
        Ok(vec![vec![
            e.into(),
            lo.value.into(),
            hi.value.into(),
            hi.valid.into(),
            t.into(),
            budget.theta_bound.into(),
            budget.theta0.into(),
        ]])
    })
}

/// Sets `path` (dotted for nested tables) in a potential document.
fn set_param(table: &mut toml::Table, path: &str, value: f64) -> Result<(), CliError> {
    let mut parts = path.split('.').peekable();
    let mut cur = table;
    while let Some(key) = parts.next() {
        if parts.peek().is_none() {
            match cur.get(key) {
                Some(toml::Value::Float(_) | toml::Value::Integer(_)) => {
                    cur.insert(key.to_string(), toml::Value::Float(value));
                    return Ok(());
                }
                _ => return Err(CliError::Usage(format!("--param: `{path}` is not a numeric field of the document"))),
            }
        }
        cur = match cur.get_mut(key) {
            Some(toml::Value::Table(t)) => t,
            _ => return Err(CliError::Usage(format!("--param: `{path}` does not name a nested table"))),
        };
    }
    Err(CliError::Usage("--param must not be empty".into()))
}

/// A 2-D table over (parameter, energy): the numeric transmission plus the
/// lower bound from each selected id (NaN when invalid).
pub fn sweep(
    base: &toml::Table,
    param: &str,
    values: &[f64],
    energies: &[f64],
    ids: &[String],
    s: &Settings,
) -> Result<Output, CliError> {
    let mut specs = Vec::with_capacity(values.len());
    for &v in values {
        let mut t = base.clone();
        set_param(&mut t, param, v)?;
        specs.push((v, doc::parse_table(&t)?));
    }
    let points: Vec<(f64, &PotentialSpec, f64)> =
        specs.iter().flat_map(|(v, p)| energies.iter().map(move |&e| (*v, p, e))).collect();
    let mut columns = vec![param, "E", "T"];
    columns.extend(ids.iter().map(String::as_str));
    Ok(collect(Table::new(&columns), &points, |&(v, p, e)| {
        let d = build_dispersion(p, e, s.units)?;
        let t = solve_scattering(&d, &s.solver)?.transmission;
        let mut row: Row = vec![v.into(), e.into(), t.into()];
        for id in ids {
            let rows = registry::evaluate(id, &d, &s.quad)?;
            let value = rows
                .iter()
                .find(|b| matches!(b.kind, BoundKind::LowerT | BoundKind::EstimateT))
                .filter(|b| b.valid)
                .map_or(f64::NAN, |b| b.value);
            row.push(value.into());
        }
        Ok(vec![row])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> Settings {
        Settings::new(None).unwrap()
    }

    fn num(c: &Cell) -> f64 {
        match c {
            Cell::Num(v) => *v,
            other => panic!("not a number: {other:?}"),
        }
    }

    #[test]
    fn exact_delta_row() {
        let out = exact(&PotentialSpec::Delta { g: 2.0, x0: 0.0 }, &[1.0], &settings());
        assert!(out.failure.is_none());
        let row = &out.table.rows[0];
        assert!((num(&row[1]) - 0.5).abs() < 1e-15 && (num(&row[2]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn solve_flags_failed_points() {
        let mut s = settings();
        s.solver.max_steps = 3;
        let out = solve(&PotentialSpec::Sech2 { ve: 1.0, length: 1.0 }, &[0.5, 1.0], &s);
        assert_eq!(out.table.rows.len(), 2);
        assert!(matches!(out.failure, Some(CliError::Numerical(_))));
        assert!(num(&out.table.rows[0][1]).is_nan());
    }

    #[test]
    fn bound_rows_sorted_and_invalid_kept() {
        let ids = bound_selection("case2,case1").unwrap().unwrap();
        let out = bound(&PotentialSpec::SquareBarrier { v0: 1.0, width: 1.0 }, &[0.5, 2.0], Some(&ids), &settings());
        assert!(out.failure.is_none());
        let keys: Vec<(f64, String)> = out
            .table
            .rows
            .iter()
            .map(|r| {
                (
                    num(&r[0]),
                    match &r[1] {
                        Cell::Text(t) => t.clone(),
                        _ => unreachable!(),
                    },
                )
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        // case2 below the barrier top has a forbidden region
        assert!(out.table.rows.iter().any(|r| r[1] == Cell::from("case2") && r[4] == Cell::Bool(false)));
        let case1 = out.table.rows.iter().find(|r| num(&r[0]) == 2.0 && r[1] == Cell::from("case1")).unwrap();
        let want = 1.0 / (1.0 / 8f64.sqrt()).cosh().powi(2);
        assert!((num(&case1[3]) - want).abs() < 1e-9);
    }

    #[test]
    fn unknown_bound_id_is_unsupported() {
        assert!(matches!(bound_selection("case1,case9"), Err(CliError::Unsupported(_))));
        assert!(bound_selection("all").unwrap().is_none());
    }

    #[test]
    fn sweep_sets_nested_fields() {
        let mut t: toml::Table = "kind = 'shifted'\neps = 0.1\n[base]\nkind = 'delta'\ng = 1\n[dv]\nshape = 'boxcar'\nheight = 1\na = 0\nb = 1".parse().unwrap();
        set_param(&mut t, "base.g", 3.0).unwrap();
        assert_eq!(t["base"]["g"].as_float(), Some(3.0));
        assert!(set_param(&mut t, "base.h", 1.0).is_err());
        assert!(set_param(&mut t, "kind", 1.0).is_err());
    }
}
