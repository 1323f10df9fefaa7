use anyhow::Result;
use kac_core::ekq::{self, EkRange};
use kac_core::exact::{
    self, anticonc_sup_with_cell, double_root_prob_clt, double_root_sweep, parity_certificate,
    separation_check, smallball_prob, DoubleRootResult, SeparationOptions, SeparationVariant, Weights,
};
use kac_core::mc::{self, SimConfig, VarianceRatio, VARIANCE_CONSTANT};
use kac_core::roots::Method;
use kac_core::{Atom, Error};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::output::{csv, fixed, json_text, put_rational, sci, Run};
use crate::parse::{parse_count, parse_degrees, parse_float_interval, parse_interval, parse_rational, render_rational};

pub struct Context {
    pub threads: usize,
    pub argv: Vec<String>,
}

pub const SUMMARY_HEADER: [&str; 11] = [
    "n",
    "trials",
    "mean",
    "variance",
    "residual",
    "ci_half_width",
    "near_double_freq",
    "min_gap_p01",
    "min_gap_p50",
    "excluded",
    "seed",
];

pub const VARIANCE_HEADER: [&str; 6] = ["n", "trials", "variance", "ratio", "jackknife_se", "target"];

pub const EK_HEADER: [&str; 4] = ["n", "expected", "residual", "quad_error"];

pub fn simulate(a: &SimulateArgs, ctx: &Context) -> Result<()> {
    let mut cfg = SimConfig::new(
        Atom::parse(&a.atom)?,
        parse_degrees(&a.degrees)?,
        parse_count(&a.trials)?,
        a.seed,
    );
    cfg.b = a.b;
    cfg.epsilon = a.epsilon;
    cfg.interval = a.interval.as_deref().map(parse_interval).transpose()?;
    cfg.collect_gaps = a.stat.iter().any(|s| s == "gaps");
    cfg.collect_near_double = a.stat.iter().any(|s| s == "near-double");
    cfg.method = match a.method.as_str() {
        "exact" => Method::Exact,
        "float" => Method::Float,
        _ => Method::Auto,
    };
    let summary = mc::run_expectation(&cfg)?;

    let rows: Vec<Vec<String>> = summary
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.trials.to_string(),
                fixed(Some(r.mean)),
                fixed(Some(r.variance)),
                fixed(Some(r.residual)),
                fixed(Some(r.ci_half_width)),
                fixed(r.near_double_freq),
                sci(r.min_gap_p01),
                sci(r.min_gap_p50),
                r.excluded.to_string(),
                r.seed.to_string(),
            ]
        })
        .collect();
    let mut run = Run::new(&a.out)?;
    let text = csv(&SUMMARY_HEADER, &rows);
    print!("{text}");
    run.write("summary.csv", &text)?;

    if a.stat.iter().any(|s| s == "variance") {
        let rows: Vec<Vec<String>> = summary
            .rows
            .iter()
            .filter(|r| r.n >= 2)
            .map(VarianceRatio::from_summary)
            .map(|v| {
                vec![
                    v.n.to_string(),
                    v.trials.to_string(),
                    fixed(Some(v.variance)),
                    fixed(Some(v.ratio)),
                    fixed(Some(v.jackknife_se)),
                    fixed(Some(VARIANCE_CONSTANT)),
                ]
            })
            .collect();
        let text = csv(&VARIANCE_HEADER, &rows);
        print!("{text}");
        run.write("variance.csv", &text)?;
    }
    run.finish("simulate", a, Some(a.seed), ctx.threads, &ctx.argv)
}

pub fn ek(a: &EkArgs, ctx: &Context) -> Result<()> {
    let ns: Vec<u64> = match (&a.n, &a.n_sweep) {
        (Some(n), _) => vec![parse_count(n)?],
        (None, Some(s)) => parse_degrees(s)?.into_iter().map(|n| n as u64).collect(),
        (None, None) => unreachable!("clap requires one of --n, --n-sweep"),
    };
    let range = match &a.interval {
        Some(s) => {
            let (lo, hi) = parse_float_interval(s)?;
            EkRange::Between(lo, hi)
        }
        None => EkRange::WholeLine,
    };
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let q = ekq::ek_expected_with_tolerance(n, range, a.tolerance)?;
        let residual = matches!(range, EkRange::WholeLine)
            .then(|| q.value - 2.0 / std::f64::consts::PI * (n as f64).ln());
        rows.push(vec![
            n.to_string(),
            format!("{:.12}", q.value),
            residual.map(|r| format!("{r:.12}")).unwrap_or_default(),
            sci(Some(q.error_estimate)),
        ]);
    }
    let mut run = Run::new(&a.out)?;
    let text = csv(&EK_HEADER, &rows);
    print!("{text}");
    run.write("ek.csv", &text)?;
    run.finish("ek", a, None, ctx.threads, &ctx.argv)
}

fn double_root_json(r: &DoubleRootResult) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("n".into(), json!(r.n));
    o.insert("N".into(), json!(r.big_n));
    o.insert("count1".into(), json!(r.count1.to_string()));
    o.insert("count_m1".into(), json!(r.count_m1.to_string()));
    o.insert("count_both".into(), json!(r.count_both.to_string()));
    o.insert("total".into(), json!(r.total.to_string()));
    put_rational(&mut o, "p1", &r.p1);
    put_rational(&mut o, "pm1", &r.pm1);
    put_rational(&mut o, "p_union", &r.p_union);
    o.insert("certificate".into(), json!(r.certificate.map(|c| c.name())));
    o
}

fn header(oracle: &str) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("oracle".into(), json!(oracle));
    o
}

pub fn exact_cmd(cmd: &ExactCommand, ctx: &Context) -> Result<()> {
    let name = cmd.name();
    let mut o = header(name);
    let mut failure: Option<Error> = None;
    let (out, params): (_, Value) = match cmd {
        ExactCommand::DoubleRoot(a) => {
            let n_max = a.n.or(a.n_max).expect("clap requires --n or --n-max");
            let all = double_root_sweep(n_max, a.big_n)?;
            if a.n.is_some() {
                o.extend(double_root_json(all.last().expect("n ≥ 1")));
            } else {
                o.insert("N".into(), json!(a.big_n));
                let rows: Vec<Value> = all.iter().map(|r| Value::Object(double_root_json(r))).collect();
                o.insert("results".into(), Value::Array(rows));
            }
            (&a.out, serde_json::to_value(a)?)
        }
        ExactCommand::Anticonc(a) => {
            let w = Weights::parse(&a.weights)?;
            let (sup, cell) = anticonc_sup_with_cell(a.n, a.big_n, w)?;
            o.insert("n".into(), json!(a.n));
            o.insert("N".into(), json!(a.big_n));
            o.insert("weights".into(), json!(a.weights));
            put_rational(&mut o, "sup", &sup);
            o.insert("cell".into(), json!([cell.0, cell.1]));
            (&a.out, serde_json::to_value(a)?)
        }
        ExactCommand::SmallBall(a) => {
            let x = parse_rational(&a.x)?;
            let delta = parse_rational(&a.delta)?;
            let p = smallball_prob(a.n, a.big_n, &x, &delta)?;
            o.insert("n".into(), json!(a.n));
            o.insert("N".into(), json!(a.big_n));
            o.insert("x".into(), json!(render_rational(&x)));
            o.insert("delta".into(), json!(render_rational(&delta)));
            put_rational(&mut o, "probability", &p);
            (&a.out, serde_json::to_value(a)?)
        }
        ExactCommand::Separation(a) => {
            let variant = SeparationVariant::parse(&a.variant)?;
            let x = parse_rational(&a.x)?;
            let opts = SeparationOptions { c0: parse_rational(&a.c0)?, ..SeparationOptions::default() };
            let r = separation_check(variant, &x, a.big_n, a.k, &opts)?;
            o.insert("variant".into(), json!(r.variant.name()));
            o.insert("x".into(), json!(render_rational(&r.x)));
            o.insert("N".into(), json!(r.big_n));
            o.insert("k".into(), json!(r.k));
            o.insert("ell".into(), json!(r.ell));
            o.insert("values".into(), json!(r.values));
            match &r.min_gap {
                Some(g) => put_rational(&mut o, "min_gap", g),
                None => {
                    o.insert("min_gap".into(), Value::Null);
                    o.insert("min_gap_float".into(), Value::Null);
                }
            }
            put_rational(&mut o, "bound", &r.bound);
            o.insert("pass".into(), json!(r.pass));
            o.insert("reason".into(), json!(r.reason));
            o.insert("float_certified".into(), json!(r.float_certified));
            (&a.out, serde_json::to_value(a)?)
        }
        ExactCommand::CltCalibrate(a) => {
            o.insert("N".into(), json!(a.big_n));
            match a.n {
                Some(n) => {
                    let cert = parity_certificate(n, a.big_n)?;
                    o.insert("n".into(), json!(n));
                    o.insert("certificate".into(), json!(cert.name()));
                    match double_root_prob_clt(n, a.big_n) {
                        Ok(_) => {
                            let r = exact::double_root_prob_exact(n, a.big_n)?;
                            o.extend(clt_row(&r)?);
                        }
                        Err(e @ Error::Infeasible(_)) => failure = Some(e),
                        Err(e) => return Err(e.into()),
                    }
                }
                None => {
                    let n_max = a.n_max.expect("clap requires --n or --n-max");
                    let all = double_root_sweep(n_max, a.big_n)?;
                    let rows = all
                        .iter()
                        .filter(|r| r.n >= 3)
                        .map(|r| {
                            let mut row = Map::new();
                            row.insert("n".into(), json!(r.n));
                            let cert = parity_certificate(r.n, a.big_n)?;
                            row.insert("certificate".into(), json!(cert.name()));
                            if !(a.big_n == 1 && cert.is_obstruction()) {
                                row.extend(clt_row(r)?);
                            }
                            Ok(Value::Object(row))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    o.insert("results".into(), Value::Array(rows));
                }
            }
            (&a.out, serde_json::to_value(a)?)
        }
    };
    let mut run = Run::new(out)?;
    let text = json_text(&Value::Object(o));
    print!("{text}");
    run.write(&format!("{name}.json"), &text)?;
    run.finish(&format!("exact {name}"), &params, None, ctx.threads, &ctx.argv)?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn clt_row(r: &DoubleRootResult) -> Result<Map<String, Value>> {
    let clt = double_root_prob_clt(r.n, r.big_n)?;
    let mut o = Map::new();
    put_rational(&mut o, "exact_p1", &r.p1);
    o.insert("clt".into(), json!(clt.value));
    o.insert("ratio".into(), json!(r.p1.to_f64().map(|p| p / clt.value)));
    Ok(o)
}
