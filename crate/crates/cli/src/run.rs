use pqapprox_core::convergence::{
    assess_convergence, fit_rate, make_sequence, run_bound_experiment, voronovskaja_table, ParamSequence,
    SequenceSpec,
};
use pqapprox_core::moments::{
    central_moment_ordinary, central_moment_pq, constant_ratios, lemma2_residual, lemma3_decompose, MomentKind,
};
use pqapprox_core::operators::{apply, apply_higher, apply_higher_poly, apply_poly};
use pqapprox_core::{corpus, ratio, Error, Mode, PQParams, Rational};
use rayon::prelude::*;

use crate::config::{Command, ParamPlan, RunConfig};
use crate::table::{format_f64, format_rational, ResultTable};
use crate::CliError;

pub const CONVERGE_SCHEMA: [&str; 8] = ["n", "p_n", "q_n", "bracket_n", "sup_error", "omega", "bound", "ratio"];

/// A finished table plus, for identity checks, the first failing case.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: ResultTable,
    pub failure: Option<String>,
}

fn compute(err: Error) -> CliError {
    CliError::Compute(err.to_string())
}

fn at_n(n: u32, err: Error) -> CliError {
    match err {
        // already names n, m, p and q
        Error::StructureViolation { .. } => compute(err),
        other => CliError::Compute(format!("n={n}: {other}")),
    }
}

fn bundle(config: &RunConfig) -> Result<pqapprox_core::operators::FunctionBundle<f64>, CliError> {
    corpus::lookup(&config.function).ok_or_else(|| CliError::Usage(format!("unknown function {}", config.function)))
}

fn sequence(plan: &ParamPlan) -> Result<ParamSequence, CliError> {
    let spec = match plan {
        ParamPlan::Fixed { p, q } => SequenceSpec::Fixed {
            p: p.to_f64(),
            q: q.to_f64(),
        },
        ParamPlan::OneMinusReciprocal => SequenceSpec::OneMinusReciprocal,
    };
    make_sequence(spec).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let done = |table| Outcome { table, failure: None };
    match config.command {
        Command::Eval => match config.mode {
            Mode::Float => eval_float(config).map(done),
            Mode::Rational => eval_rational(config).map(done),
        },
        Command::Moments => moments(config).map(done),
        Command::RecurrenceCheck => recurrence_check(config),
        Command::Converge => converge(config).map(done),
        Command::Voronovskaja => voronovskaja(config).map(done),
        Command::Constants => constants(config).map(done),
    }
}

const EVAL_SCHEMA: [&str; 6] = ["n", "x", "b_f", "b_r_f", "f", "error"];

fn eval_float(config: &RunConfig) -> Result<ResultTable, CliError> {
    let f = bundle(config)?;
    let mut table = ResultTable::new(&EVAL_SCHEMA, config.echo());
    let g = config.grid as f64;
    for &n in &config.n_list {
        let params = config.params.float_at(n).map_err(|e| at_n(n, e))?;
        let rows = (0..=config.grid)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 / g;
                let b = apply(|t: &f64| f.eval(t), n, &params, &x)?;
                let br = apply_higher(&f, config.r, n, &params, &x)?;
                let fx = f.eval(&x);
                Ok(vec![
                    n.to_string(),
                    format_f64(x),
                    format_f64(b),
                    format_f64(br),
                    format_f64(fx),
                    format_f64(br - fx),
                ])
            })
            .collect::<Result<Vec<_>, Error>>()
            .map_err(|e| at_n(n, e))?;
        rows.into_iter().for_each(|row| table.push(row));
    }
    Ok(table)
}

fn eval_rational(config: &RunConfig) -> Result<ResultTable, CliError> {
    let poly = corpus::polynomial(&config.function)
        .ok_or_else(|| CliError::Usage(format!("{} has no exact form", config.function)))?;
    let mut table = ResultTable::new(&EVAL_SCHEMA, config.echo());
    let grid = config.grid as i64;
    for &n in &config.n_list {
        let params = config.params.rational_at(n).map_err(|e| at_n(n, e))?;
        let b = apply_poly(&poly, n, &params).map_err(|e| at_n(n, e))?;
        let br = apply_higher_poly(&poly, config.r, n, &params).map_err(|e| at_n(n, e))?;
        let rows: Vec<Vec<String>> = (0..=grid)
            .into_par_iter()
            .map(|i| {
                let x = ratio(i, grid);
                let (bx, brx, fx) = (b.eval(&x), br.eval(&x), poly.eval(&x));
                let err = &brx - &fx;
                vec![
                    n.to_string(),
                    format_rational(&x),
                    format_rational(&bx),
                    format_rational(&brx),
                    format_rational(&fx),
                    format_rational(&err),
                ]
            })
            .collect();
        rows.into_iter().for_each(|row| table.push(row));
    }
    Ok(table)
}

fn rational_params(config: &RunConfig, n: u32) -> Result<PQParams<Rational>, CliError> {
    config.params.rational_at(n).map_err(|e| at_n(n, e))
}

/// Long format: one row per coefficient of the (p,q)-power moment, the
/// ordinary moment and, for `m >= 2`, the structure coefficients `b_k`.
fn moments(config: &RunConfig) -> Result<ResultTable, CliError> {
    let m = config.m;
    let blocks = config
        .n_list
        .par_iter()
        .map(|&n| {
            let params = rational_params(config, n)?;
            let pq = central_moment_pq(n, m, &params).map_err(|e| at_n(n, e))?;
            let ord = central_moment_ordinary(n, m, &params).map_err(|e| at_n(n, e))?;
            let b = if m >= 2 {
                lemma3_decompose(n, m, &params).map_err(|e| at_n(n, e))?.b
            } else {
                Vec::new()
            };
            let mut rows = Vec::new();
            let mut series = |name: &str, coeffs: &[Rational]| {
                for (k, c) in coeffs.iter().enumerate() {
                    rows.push(vec![n.to_string(), m.to_string(), name.to_string(), k.to_string(), format_rational(c)]);
                }
            };
            series("pq_moment", pq.poly.coeffs());
            series("ordinary_moment", ord.poly.coeffs());
            series("b", &b);
            Ok(rows)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = ResultTable::new(&["n", "m", "series", "k", "value"], config.echo());
    blocks.into_iter().flatten().for_each(|row| table.push(row));
    Ok(table)
}

/// Every `(n, m')` with `n` in the list and `1 <= m' <= m`.
fn recurrence_check(config: &RunConfig) -> Result<Outcome, CliError> {
    let cells: Vec<(u32, u32)> = config
        .n_list
        .iter()
        .flat_map(|&n| (1..=config.m).map(move |m| (n, m)))
        .collect();
    let verdicts = cells
        .par_iter()
        .map(|&(n, m)| {
            let params = rational_params(config, n)?;
            let recurrence_zero = lemma2_residual(n, m, &params).map_err(|e| at_n(n, e))?.is_zero();
            let structure = if m < 2 {
                None
            } else {
                match lemma3_decompose(n, m, &params) {
                    Ok(d) => Some(d.residual.is_zero()),
                    Err(Error::StructureViolation { .. }) => Some(false),
                    Err(e) => return Err(at_n(n, e)),
                }
            };
            Ok((n, m, params, recurrence_zero, structure))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let word = |zero: bool| if zero { "zero" } else { "nonzero" };
    let mut table = ResultTable::new(&["n", "m", "p", "q", "recurrence", "structure", "verdict"], config.echo());
    let mut failure = None;
    for (n, m, params, recurrence_zero, structure) in verdicts {
        let ok = recurrence_zero && structure.unwrap_or(true);
        if !ok && failure.is_none() {
            failure = Some(format!(
                "nonzero residual at n={n}, m={m}, p={}, q={}",
                format_rational(params.p()),
                format_rational(params.q())
            ));
        }
        table.push(vec![
            n.to_string(),
            m.to_string(),
            format_rational(params.p()),
            format_rational(params.q()),
            word(recurrence_zero).to_string(),
            structure.map_or("n/a", word).to_string(),
            if ok { "zero residual" } else { "nonzero residual" }.to_string(),
        ]);
    }
    table.meta.insert(
        "verdict".into(),
        if failure.is_none() { "all zero" } else { "nonzero found" }.into(),
    );
    Ok(Outcome { table, failure })
}

fn converge(config: &RunConfig) -> Result<ResultTable, CliError> {
    let f = bundle(config)?;
    let seq = sequence(&config.params)?;
    let records = run_bound_experiment(&f, config.r, &seq, &config.n_list, config.grid).map_err(compute)?;
    let mut table = ResultTable::new(&CONVERGE_SCHEMA, config.echo());
    for rec in &records {
        table.push(vec![
            rec.n.to_string(),
            format_f64(rec.p_n),
            format_f64(rec.q_n),
            format_f64(rec.bracket_n),
            format_f64(rec.sup_error),
            format_f64(rec.omega),
            format_f64(rec.bound),
            format_f64(rec.ratio),
        ]);
    }
    if let Some(a) = assess_convergence(&records) {
        table.meta.insert("converging".into(), a.converging.to_string());
        table.meta.insert("bracket_growth".into(), format_f64(a.bracket_growth));
        table.meta.insert("error_reduction".into(), format_f64(a.error_reduction));
    }
    match fit_rate(&records) {
        Ok(fit) => {
            table.meta.insert("rate_slope".into(), format_f64(fit.slope));
            table.meta.insert("rate_r_squared".into(), format_f64(fit.r_squared));
        }
        Err(_) => {
            table.meta.insert("rate_slope".into(), "n/a".into());
        }
    }
    Ok(table)
}

fn voronovskaja(config: &RunConfig) -> Result<ResultTable, CliError> {
    let f = bundle(config)?;
    let seq = sequence(&config.params)?;
    let rows = voronovskaja_table(&f, &seq, &config.n_list, config.grid).map_err(compute)?;
    let mut table = ResultTable::new(
        &["n", "p_n", "q_n", "bracket_n", "deviation", "scaled_deviation"],
        config.echo(),
    );
    for row in &rows {
        table.push(vec![
            row.n.to_string(),
            format_f64(row.p_n),
            format_f64(row.q_n),
            format_f64(row.bracket_n),
            format_f64(row.deviation),
            format_f64(row.scaled_deviation),
        ]);
    }
    Ok(table)
}

/// Grid maxima of the moment-bound ratios over all degrees in the list,
/// one row per `(m', kind)` for `1 <= m' <= m`.
fn constants(config: &RunConfig) -> Result<ResultTable, CliError> {
    let params: Vec<(u32, PQParams<f64>)> = config
        .n_list
        .iter()
        .map(|&n| config.params.float_at(n).map(|p| (n, p)).map_err(|e| at_n(n, e)))
        .collect::<Result<_, _>>()?;
    let kinds = [(MomentKind::PQPower, "pq-power"), (MomentKind::Ordinary, "ordinary")];
    let cells: Vec<(u32, usize)> = (1..=config.m).flat_map(|m| (0..kinds.len()).map(move |k| (m, k))).collect();
    let rows = cells
        .par_iter()
        .map(|&(m, k)| {
            let (mut c_hat, mut k_hat) = (0.0_f64, 0.0_f64);
            for (n, pq) in &params {
                let (c, kk) = constant_ratios(m, *n, pq, kinds[k].0).map_err(|e| at_n(*n, e))?;
                c_hat = c_hat.max(c);
                k_hat = k_hat.max(kk);
            }
            Ok(vec![m.to_string(), kinds[k].1.to_string(), format_f64(c_hat), format_f64(k_hat)])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = ResultTable::new(&["m", "kind", "c_hat", "k_hat"], config.echo());
    rows.into_iter().for_each(|row| table.push(row));
    Ok(table)
}
