use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sidon_core::analysis::{self, pins, Pins};
use sidon_core::curve::{
    curve_point_count, dyadic_box_coverage, enumerate_quadric, hasse_gap, hasse_slack, repeated_coordinate_count,
    torus_csv, torus_points, triple_rep_count, CurveParams, QuadricParams,
};
use sidon_core::decompose::{decompose3_ruzsa, decompose3_zn, decompose4_ruzsa, SearchMode};
use sidon_core::deletion::{
    b2_2_lift_report, destruction_audit_with, enumerate_family, sidon_lift_report, AuditMode, FamilyKind, FamilySpec,
};
use sidon_core::numbertheory::{pow_mod, primitive_root};
use sidon_core::random_model::{sample_sequence, IntSeq, SampleConfig};
use sidon_core::sidon::{
    b2g_bound, basis_order_check, erdos_turan_set, is_sidon, ruzsa_set, DistinctFlag, ModSet, Mode,
};
use sidon_core::sunflower::{find_vectorial_sunflower, is_vectorial_sunflower};
use sidon_core::{Error, Rational, Result};

use crate::args::*;

pub struct Output {
    pub payload: Value,
    /// Tabular form for `--format csv`, when the command has one.
    pub csv: Option<String>,
}

fn out<T: Serialize>(v: &T) -> Result<Output> {
    Ok(Output {
        payload: to_value(v),
        csv: None,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serializes")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn generator(p: u64, g: Option<u64>) -> Result<u64> {
    match g {
        Some(g) => Ok(g),
        None => primitive_root(p),
    }
}

pub fn dispatch(cmd: &Command, seed: u64) -> Result<Output> {
    match cmd {
        Command::Construct(c) => construct(c),
        Command::Verify(v) => verify(v),
        Command::Curve(c) => curve(c),
        Command::Decompose(d) => decompose(d),
        Command::Sample(s) => sample(&s.model, seed),
        Command::Lift(l) => lift(l, seed),
        Command::Family(f) => family(f, seed),
        Command::Sunflower(s) => sunflower(s),
        Command::Analyze(a) => analyze(a, seed),
        Command::Audit(a) => audit(a, seed),
    }
}

fn construct(c: &Construct) -> Result<Output> {
    match *c {
        Construct::ErdosTuran { p } => out(&erdos_turan_set(p)?),
        Construct::Ruzsa { p, g } => out(&ruzsa_set(p, generator(p, g)?)?),
    }
}

/// Strips the `{status, payload, config_hash}` envelope written by this tool.
fn unwrap_payload(text: String) -> String {
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(mut map)) if map.contains_key("payload") && map.contains_key("status") => {
            map.remove("payload").map_or(text, |p| p.to_string())
        }
        _ => text,
    }
}

fn load_set(path: &Path) -> Result<ModSet> {
    ModSet::parse(&unwrap_payload(read(path)?))
}

fn mode_for(set: &ModSet, mode: ModeArg) -> Mode {
    match mode {
        ModeArg::Cyclic => Mode::Cyclic(set.modulus()),
        ModeArg::Integer => Mode::Integer,
    }
}

fn verify(v: &Verify) -> Result<Output> {
    match v {
        Verify::Sidon { input, mode } => {
            let set = load_set(input)?;
            let w = is_sidon(set.elements(), mode_for(&set, *mode));
            out(&json!({ "sidon": w.verdict, "witness": w.collision }))
        }
        Verify::B2g { input, mode } => {
            let set = load_set(input)?;
            out(&json!({ "g": b2g_bound(set.elements(), mode_for(&set, *mode)) }))
        }
        Verify::Basis { input, h, distinct } => {
            let set = load_set(input)?;
            let flag = match distinct {
                DistinctArg::None => DistinctFlag::None,
                DistinctArg::Pairwise => DistinctFlag::Pairwise,
            };
            out(&basis_order_check(&set, *h, flag)?)
        }
    }
}

fn curve(c: &Curve) -> Result<Output> {
    match *c {
        Curve::Count { p, b, lambda } => {
            let cp = CurveParams::new(p, b, lambda)?;
            out(&json!({
                "params": cp,
                "points": curve_point_count(&cp),
                "hasse_gap": hasse_gap(&cp),
                "hasse_slack": hasse_slack(p),
            }))
        }
        Curve::Identity { p, g, a, b } => {
            let g = generator(p, g)?;
            let row = |a: u64, b: u64| -> Result<Value> {
                let cp = CurveParams::new(p, b, pow_mod(g, a, p))?;
                let triples = triple_rep_count(p, g, a, b, DistinctFlag::None)?;
                let repeated = repeated_coordinate_count(p, g, a, b)?;
                Ok(json!({
                    "a": a, "b": b, "triples": triples, "points": curve_point_count(&cp),
                    "repeated": repeated, "distinct": triples - repeated,
                }))
            };
            match (a, b) {
                (Some(a), Some(b)) => out(&row(a, b)?),
                _ => {
                    let mut rows = Vec::new();
                    for a in 0..p - 1 {
                        for b in 0..p {
                            rows.push(row(a, b)?);
                        }
                    }
                    let mismatches: Vec<&Value> = rows.iter().filter(|r| r["triples"] != r["points"]).collect();
                    let max_rep = rows.iter().filter_map(|r| r["repeated"].as_u64()).max();
                    let min_distinct = rows.iter().filter_map(|r| r["distinct"].as_u64()).min();
                    let mut csv = String::from("a,b,triples,points,repeated,distinct\n");
                    for r in &rows {
                        let _ = writeln!(
                            csv,
                            "{},{},{},{},{},{}",
                            r["a"], r["b"], r["triples"], r["points"], r["repeated"], r["distinct"]
                        );
                    }
                    Ok(Output {
                        payload: json!({
                            "p": p, "g": g, "targets": rows.len(), "mismatches": mismatches,
                            "max_repeated": max_rep, "min_distinct": min_distinct,
                        }),
                        csv: Some(csv),
                    })
                }
            }
        }
        Curve::Quadric { p, r1, r2 } => {
            let qp = QuadricParams::any_prime(p, r1, r2)?;
            let sols = enumerate_quadric(&qp);
            Ok(Output {
                payload: to_value(&sols),
                csv: Some(torus_csv(&qp, &torus_points(&qp))),
            })
        }
        Curve::Coverage { p, r1, r2, k } => {
            let qp = QuadricParams::any_prime(p, r1, r2)?;
            let cov = dyadic_box_coverage(&torus_points(&qp), k)?;
            out(&json!({ "params": qp, "level": k, "coverage": cov, "empty_fraction": cov.empty_fraction() }))
        }
    }
}

fn decompose(d: &Decompose) -> Result<Output> {
    match *d {
        Decompose::Ruzsa3 { p, g, a, b, distinct } => out(&decompose3_ruzsa(p, generator(p, g)?, a, b, distinct)?),
        Decompose::Ruzsa4 { p, g, a, b } => out(&decompose4_ruzsa(p, generator(p, g)?, a, b)?),
        Decompose::Zn { modulus, n, search } => {
            let mode = match search {
                SearchArg::Box => SearchMode::Box,
                SearchArg::Exhaustive => SearchMode::Exhaustive,
            };
            out(&decompose3_zn(n, modulus, mode)?)
        }
    }
}

pub fn model_config(m: &ModelArgs, seed: u64) -> Result<SampleConfig> {
    let residues = if let Some(path) = &m.residues {
        load_set(path)?
    } else if let Some(p) = m.ruzsa {
        ruzsa_set(p, primitive_root(p)?)?
    } else {
        ModSet::full(m.full.unwrap_or(1))?
    };
    SampleConfig::new(m.gamma, m.m, residues, m.horizon, seed)
}

fn sample(m: &ModelArgs, seed: u64) -> Result<Output> {
    let cfg = model_config(m, seed)?;
    let seq = sample_sequence(&cfg)?;
    Ok(Output {
        payload: json!({ "config": cfg, "config_hash": cfg.hash(), "elements": seq.elements() }),
        csv: Some(seq.to_lines()),
    })
}

/// The sequence and the residue modulus it is judged against.
fn load_seq(s: &SeqArgs, seed: u64) -> Result<(IntSeq, SampleConfig)> {
    let cfg = model_config(&s.model, seed)?;
    let seq = match &s.input {
        Some(path) => IntSeq::from_lines(&read(path)?, s.model.horizon)?,
        None => sample_sequence(&cfg)?,
    };
    Ok((seq, cfg))
}

fn lift(l: &Lift, seed: u64) -> Result<Output> {
    let (report, original) = match l {
        Lift::Sidon { seq, fixpoint } => {
            let (a, _) = load_seq(seq, seed)?;
            (sidon_lift_report(&a, *fixpoint), a)
        }
        Lift::B22 { seq, fixpoint } => {
            let (a, _) = load_seq(seq, seed)?;
            (b2_2_lift_report(&a, *fixpoint), a)
        }
    };
    Ok(Output {
        payload: json!({
            "kind": report.kind,
            "original": original.len(),
            "kept": report.kept.elements(),
            "witnesses": report.witnesses,
            "passes": report.passes,
            "verified": report.verify(&original),
        }),
        csv: Some(report.kept.to_lines()),
    })
}

fn family(f: &Family, seed: u64) -> Result<Output> {
    let Family::Enumerate {
        kind,
        target,
        modulus,
        epsilon,
        seq,
    } = f;
    let (a, cfg) = load_seq(seq, seed)?;
    let spec = FamilySpec::new(FamilyKind::parse(kind)?, *target, modulus.unwrap_or(cfg.modulus()), *epsilon)?;
    let fam = enumerate_family(&a, &spec)?;
    Ok(Output {
        payload: json!({ "spec": spec, "count": fam.len(), "members": fam.members() }),
        csv: Some(fam.to_json_lines()),
    })
}

/// A JSON array of tuples, or JSON lines each holding a `tuple`.
fn load_members(path: &Path) -> Result<Vec<Vec<u64>>> {
    let text = unwrap_payload(read(path)?);
    let bad = |e: serde_json::Error| Error::Parse(e.to_string());
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(bad);
    }
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Value = serde_json::from_str(l).map_err(bad)?;
            serde_json::from_value(v["tuple"].clone()).map_err(bad)
        })
        .collect()
}

fn sunflower(s: &Sunflower) -> Result<Output> {
    match s {
        Sunflower::Find { input, k } => {
            let members = load_members(input)?;
            let cert = find_vectorial_sunflower(&members, *k);
            let petals: Option<Vec<&Vec<u64>>> =
                cert.as_ref().map(|c| c.petal_indices.iter().map(|&i| &members[i]).collect());
            out(&json!({ "found": cert.is_some(), "certificate": cert, "petals": petals }))
        }
        Sunflower::Check { input, type_set } => {
            let members = load_members(input)?;
            out(&json!({ "sunflower": is_vectorial_sunflower(&members, type_set) }))
        }
    }
}

fn f64_of(r: Rational) -> f64 {
    r.to_f64()
}

fn analyze(a: &Analyze, seed: u64) -> Result<Output> {
    match a {
        Analyze::Sigma { alpha, beta, n, m } => {
            let spec = analysis::SumSpec::new(*alpha, *beta, *n, *m, 1.0)?;
            out(&json!({ "sigma": analysis::sigma(&spec) }))
        }
        Analyze::Tau {
            alpha,
            beta,
            n,
            m,
            tol,
        } => {
            let spec = analysis::SumSpec::new(*alpha, *beta, *n, *m, *tol)?;
            out(&analysis::tau(&spec)?)
        }
        Analyze::LemmaAb {
            alpha,
            beta,
            n_max,
            per_decade,
            ms,
            tol,
        } => {
            let ns = analysis::log_grid(2, (*n_max).max(2), *per_decade);
            let r = analysis::check_lemma_ab(f64_of(*alpha), f64_of(*beta), &ns, ms, *tol)?;
            let mut csv = String::from("series,target,m,value,normalized\n");
            for rep in [&r.sigma, &r.tau] {
                for line in rep.to_csv().lines().skip(1) {
                    let _ = writeln!(csv, "{},{line}", rep.label);
                }
            }
            Ok(Output {
                payload: to_value(&r),
                csv: Some(csv),
            })
        }
        Analyze::LemmaAbab { gamma, values, tol } => {
            let pairs: Vec<(u64, u64)> = values.iter().flat_map(|&x| values.iter().map(move |&y| (x, y))).collect();
            let r = analysis::check_lemma_abab(f64_of(*gamma), &pairs, *tol)?;
            Ok(Output {
                csv: Some(r.to_csv()),
                payload: to_value(&r),
            })
        }
        Analyze::Expectation { targets, model } | Analyze::Delta { targets, model } => {
            let cfg = model_config(model, seed)?;
            let want_delta = matches!(a, Analyze::Delta { .. });
            let g = cfg.gamma.to_f64();
            let rows: Vec<analysis::QStats> = targets.iter().map(|&n| analysis::q_stats(n, &cfg)).collect();
            let mut csv = String::from("target,value,normalized\n");
            for s in &rows {
                let (v, e) = if want_delta { (s.delta, 2.0 / 11.0) } else { (s.mean, 3.0 * g - 2.0) };
                let _ = writeln!(csv, "{},{:e},{:e}", s.n, v, v * (s.n as f64).powf(e));
            }
            Ok(Output {
                payload: json!({ "config_hash": cfg.hash(), "rows": rows }),
                csv: Some(csv),
            })
        }
        Analyze::Montecarlo {
            kind,
            targets,
            trials,
            epsilon,
            model,
        } => {
            let cfg = model_config(model, seed)?;
            let rows = analysis::monte_carlo_family_mean(FamilyKind::parse(kind)?, targets, &cfg, *trials, *epsilon)?;
            let mut csv = String::from("target,mean,stderr\n");
            for r in &rows {
                let _ = writeln!(csv, "{},{:e},{:e}", r.target, r.mean, r.stderr);
            }
            Ok(Output {
                payload: json!({ "config_hash": cfg.hash(), "trials": trials, "rows": rows }),
                csv: Some(csv),
            })
        }
        Analyze::Janson { n, trials, model } => {
            let cfg = model_config(model, seed)?;
            out(&analysis::janson_check(*n, &cfg, *trials)?)
        }
        Analyze::Pins => {
            let p: Pins = pins::measure_pins()?;
            out(&p)
        }
    }
}

fn audit(a: &Audit, seed: u64) -> Result<Output> {
    let Audit::Destruction {
        mode,
        epsilon,
        targets,
        seq,
    } = a;
    let (seq, cfg) = load_seq(seq, seed)?;
    let mode = match (mode, epsilon) {
        (AuditArg::B22, None) => AuditMode::B22,
        (AuditArg::Sidon, Some(e)) => AuditMode::Sidon { epsilon: *e },
        (AuditArg::B22, Some(_)) => return Err(Error::InvalidParameter("b22 audit takes no epsilon".into())),
        (AuditArg::Sidon, None) => return Err(Error::InvalidParameter("sidon audit needs --epsilon".into())),
    };
    let lifted = match mode {
        AuditMode::B22 => b2_2_lift_report(&seq, false).kept,
        AuditMode::Sidon { .. } => sidon_lift_report(&seq, false).kept,
    };
    let rows = targets
        .iter()
        .map(|&n| destruction_audit_with(&seq, &lifted, n, cfg.modulus(), mode))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("n,before,after,obstruction,holds\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{},{},{}", r.n, r.before, r.after, r.obstruction, r.holds);
    }
    Ok(Output {
        payload: json!({ "all_hold": rows.iter().all(|r| r.holds), "rows": rows }),
        csv: Some(csv),
    })
}
