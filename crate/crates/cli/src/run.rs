//! Executes job documents.

use hahn::{criterion_check, solve_frobenius, HahnElement, HahnError};
use padic_core::{Character, Padic, Ring, Trunc};
use periods::{eigen_residual, finite_slope_test, order_at, saturation_test, slope_threshold, solve_period};
use phigamma::{Frame, PhiGammaModule};
use triang::{
    build_trianguline, chain_test, default_cutoff, extract_triangulation, family_parameters, locus_scan, refinement_parameters, solve_chain,
    transport, unimodular, Chain, Criterion, FilteredPhiModule, Refinement, ScanPoint,
};

use crate::job::{CharDef, Config, JobDocument, ModuleDef, ModuleKind, ParamSpec, QueryKind};
use crate::report::{self as fmt, QueryReport, ReportDocument, Status, Table};
use crate::suites;

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Re-check every certificate by an independent computation.
    pub verify: bool,
}

/// A module ready for queries, with its refinement data when it was built
/// from a filtered φ-module.
pub struct Built {
    pub module: PhiGammaModule<Padic>,
    pub refined: Option<(FilteredPhiModule<Padic>, Refinement<Padic>, Chain<Padic>)>,
}

pub fn character(c: &CharDef, cfg: &Config) -> Character<Padic> {
    let q = cfg.qp();
    let m = cfg.base_order;
    let ch = Character::new(c.p_value.to_trunc(q, m), c.weight);
    match &c.nu {
        Some(n) => ch.with_nu(n.to_trunc(q, m)),
        None => ch,
    }
}

pub fn build_module(def: &ModuleDef, cfg: &Config) -> Result<Built, String> {
    let frame = cfg.frame();
    let q = cfg.qp();
    let (module, refined) = match &def.kind {
        ModuleKind::Split(cs) => {
            let mut acc: Option<PhiGammaModule<Padic>> = None;
            for c in cs {
                let r = PhiGammaModule::rank1(&character(c, cfg), frame).map_err(|e| e.to_string())?;
                acc = Some(match acc {
                    None => r,
                    Some(a) => a.direct_sum(&r).map_err(|e| e.to_string())?,
                });
            }
            (acc.expect("nonempty"), None)
        }
        ModuleKind::Filtered { eigenvalues, jumps, ordering } => {
            let eig: Vec<Padic> = eigenvalues.iter().map(|x| x.to_padic(q)).collect();
            let m = FilteredPhiModule::split(&eig, jumps).map_err(|e| e.to_string())?;
            let order: Vec<Padic> = ordering.iter().map(|&i| eig[i - 1].clone()).collect();
            let r = m.refinement(&order).map_err(|e| e.to_string())?;
            let (d, chain) = build_trianguline(&m, &r, frame).map_err(|e| e.to_string())?;
            (d, Some((m, r, chain)))
        }
    };
    if def.scramble.is_empty() {
        return Ok(Built { module, refined });
    }
    let polys: Vec<Vec<Padic>> = def.scramble.iter().map(|p| p.iter().map(|&c| q.int(c)).collect()).collect();
    let s = unimodular(module.like(), frame, module.rank(), &polys);
    let du = module.change_basis(&s.u).map_err(|e| e.to_string())?;
    let refined = refined.map(|(m, r, c)| {
        let c = transport(&c, &s.u_inv);
        (m, r, c)
    });
    Ok(Built { module: du, refined })
}

fn frame_text(f: &Frame) -> String {
    format!("[{}, {}] window {}", f.ann.r1, f.ann.r2, f.window)
}

pub fn run_job(doc: &JobDocument) -> ReportDocument {
    run_job_with(doc, RunOptions::default())
}

pub fn run_job_with(doc: &JobDocument, opts: RunOptions) -> ReportDocument {
    let cfg = &doc.config;
    let header = vec![
        ("p".to_string(), cfg.p.to_string()),
        ("N".to_string(), cfg.target.to_string()),
        ("precision".to_string(), cfg.precision.to_string()),
        ("base_order".to_string(), cfg.base_order.to_string()),
        ("frame".to_string(), frame_text(&cfg.frame())),
        ("tolerance".to_string(), (cfg.target - periods::SLACK).to_string()),
        ("verify".to_string(), opts.verify.to_string()),
        ("queries".to_string(), doc.queries.len().to_string()),
    ];
    let queries = doc
        .queries
        .iter()
        .map(|q| {
            let mut r = QueryReport::new(&q.name, q.kind.name());
            if let Err(e) = run_query(doc, &q.kind, opts, &mut r) {
                r.fail(e);
            }
            r
        })
        .collect();
    ReportDocument { header, queries, tables: doc.output.tables }
}

fn module<'a>(doc: &'a JobDocument, id: &str) -> Result<Built, String> {
    let def = doc.module(id).ok_or_else(|| format!("unknown module '{id}'"))?;
    build_module(def, &doc.config).map_err(|e| format!("module '{id}': {e}"))
}

fn run_query(doc: &JobDocument, kind: &QueryKind, opts: RunOptions, r: &mut QueryReport) -> Result<(), String> {
    let cfg = &doc.config;
    let dg = doc.output.digits;
    let tol = cfg.target - periods::SLACK;
    match kind {
        QueryKind::Solve { alpha, a, radius, den_bound } => {
            let like = cfg.like();
            let alpha = alpha.to_trunc(cfg.qp(), cfg.base_order);
            let a = HahnElement::parse(cfg.p, *den_bound, radius.clone(), &like, a).map_err(|e| e.to_string())?;
            r.set("alpha", fmt::base(&alpha, dg));
            r.set("radius", radius);
            r.set("a_support", fmt::list(&a.support()));
            match solve_frobenius(&alpha, &a, cfg.target) {
                Ok((b, cert)) => {
                    r.status = if cert.holds() { Status::Certified } else { Status::Inconclusive };
                    r.set("solution_radius", b.radius());
                    let terms: Vec<String> = b.terms().take(8).map(|(i, c)| format!("({i}, {})", fmt::base(c, dg))).collect();
                    r.set("solution_terms", b.support().len());
                    r.set("solution_head", format!("[{}]", terms.join(", ")));
                    r.set("residual_w_r", fmt::big_bound(&cert.residual_w_r));
                    r.set("residual_floor", cert.precision);
                    r.set("norm_gap", fmt::big_bound(&cert.norm_gap));
                    r.set("c_bound", &cert.c_bound);
                    r.set("dropped_terms", cert.dropped_terms);
                    r.set("tail_valuation", fmt::opt(&cert.truncated_tail_val));
                    if opts.verify {
                        let res = b.frob() - b.scale(&alpha) - a.clone();
                        let w = res.norm(radius).map_err(|e| e.to_string())?;
                        let ok_res = w.as_ref().map_or(true, |w| *w >= num_rational::BigRational::from_integer(cfg.target.into()));
                        let gap_ok = match (a.norm(radius).map_err(|e| e.to_string())?, b.norm(radius).map_err(|e| e.to_string())?) {
                            (Some(x), Some(y)) => x - y <= cert.c_bound,
                            _ => true,
                        };
                        r.set("verified", ok_res && gap_ok);
                    }
                }
                Err(HahnError::NoSolution { .. }) => {
                    r.status = Status::Answered;
                    r.set("solvable", false);
                    let rep = criterion_check(&alpha, &a, cfg.target).map_err(|e| e.to_string())?;
                    let obs: Vec<String> = rep.obstructions.iter().map(|(i, v)| format!("{i} -> {}", fmt::base(v, dg))).collect();
                    r.set("obstructions", format!("[{}]", obs.join(", ")));
                }
                Err(e) => return Err(e.to_string()),
            }
        }
        QueryKind::Sen { module: id, level, k } => {
            let d = module(doc, id)?.module;
            let s = d.sen(*level).map_err(|e| e.to_string())?;
            r.set("level", level);
            r.set("rank", d.rank());
            let poly: Vec<String> = s.sen_poly.iter().map(|c| fmt::base(c, dg)).collect();
            r.set("sen_poly", format!("[{}]", poly.join(", ")));
            r.set("integer_roots", fmt::list(&integer_roots(&s.sen_poly, s.tolerance())));
            r.set("descends", s.descends());
            r.set("commutes", s.commutes());
            r.set("commutation_valuation", s.commutation_valuation);
            r.set("tolerance", s.tolerance());
            r.set("det_theta_vanishes", s.det_vanishes());
            if let Some(k) = k {
                match s.p_value(*k) {
                    Ok(pk) => {
                        r.set("k", k);
                        r.set("p_k", fmt::base(&pk, dg));
                        r.set("p_k_valuation", fmt::val(&pk));
                        r.set("p_k_unit", pk.is_unit() && pk.coeff(0).val_floor() < s.tolerance());
                    }
                    Err(e) => {
                        r.set("k", k);
                        r.set("p_k", format!("undefined ({e})"));
                    }
                }
            }
            if !(s.descends() && s.commutes()) {
                r.status = Status::Inconclusive;
            }
            if opts.verify {
                let again = d.sen(*level).map_err(|e| e.to_string())?;
                r.set("verified", again.sen_poly == s.sen_poly && again.commutes());
            }
        }
        QueryKind::Period { module: id, delta, level, k } => {
            let d = module(doc, id)?.module;
            let delta = character(delta, cfg);
            let k = k.unwrap_or_else(|| slope_threshold(&delta, &d).max(1));
            let s = solve_period(&d, &delta, *level, k).map_err(|e| e.to_string())?;
            r.status = if s.certified { Status::Certified } else { Status::Inconclusive };
            r.set("delta", fmt::character(&delta, dg));
            r.set("level", level);
            r.set("k", k);
            r.set("k_min", s.k_min);
            r.set("rank_lower", s.lower_bound);
            r.set("rank_upper", s.upper_bound);
            r.set("formal_rank", s.formal_rank);
            r.set("invariants_rank", s.invariants_rank);
            r.set("t_orders", fmt::list(&s.t_orders));
            r.set("residual_floor", fmt::bound(&s.residual_floor));
            r.set("target", s.target);
            r.set("injective", s.injective);
            r.set("propagation", fmt::opt(&s.propagation));
            if s.vectors.len() == 1 {
                let (sat, ord) = saturation_test(&d, &s.vectors[0], *level, k).map_err(|e| e.to_string())?;
                r.set("t_order", ord);
                r.set("saturated", sat);
                let head: Vec<String> = s.vectors[0].iter().map(|e| format!("T^{}", e.low_degree())).collect();
                r.set("generator_lowest_terms", format!("[{}]", head.join(", ")));
            }
            if opts.verify {
                let mut ok = true;
                for v in &s.vectors {
                    let w = eigen_residual(&d, v, &delta).map_err(|e| e.to_string())?;
                    ok &= w.map_or(true, |w| w >= robba::W::from_integer(tol));
                }
                if s.vectors.len() == 1 {
                    let loc = d.localize_vector(&s.vectors[0], *level, k).map_err(|e| e.to_string())?;
                    let ord = loc.iter().map(|x| order_at(x, tol)).min().unwrap_or(0);
                    ok &= Some(ord.to_string().as_str()) == r.get("t_order");
                }
                r.set("verified", ok);
            }
        }
        QueryKind::FiniteSlope { module: id, alpha, level, k } => {
            let d = module(doc, id)?.module;
            let alpha = alpha.to_trunc(cfg.qp(), cfg.base_order);
            let v = finite_slope_test(&d, &alpha, *level, *k).map_err(|e| e.to_string())?;
            r.status = if v.solution.certified { Status::Certified } else { Status::Inconclusive };
            r.set("alpha", fmt::base(&alpha, dg));
            r.set("level", level);
            r.set("k", k);
            r.set("isomorphism", v.isomorphism);
            r.set("injective", v.injective);
            r.set("surjective", v.surjective);
            r.set("eigenspace_dim", v.eigenspace_dim);
            r.set("invariants_dim", v.invariants_dim);
            r.set("eigenspace_rank", v.eigenspace_rank);
            r.set("invariants_rank", v.invariants_rank);
            r.set("witness", v.witness.is_some());
            r.set("residual_floor", fmt::bound(&v.solution.residual_floor));
            if opts.verify {
                let again = finite_slope_test(&d, &alpha, *level, *k).map_err(|e| e.to_string())?;
                r.set("verified", again.isomorphism == v.isomorphism);
            }
        }
        QueryKind::Chain { module: id, params, level, k } => {
            let b = module(doc, id)?;
            let deltas = parameters(&b, params, cfg)?;
            let k = match k {
                Some(k) => *k,
                None => default_cutoff(&b.module, &deltas).map_err(|e| e.to_string())?,
            };
            r.set("parameters", fmt::list(&deltas.iter().map(|c| fmt::character(c, dg)).collect::<Vec<_>>()));
            r.set("level", level);
            r.set("k", k);
            let (chain, orders) = solve_chain(&b.module, &deltas, *level, k).map_err(|e| e.to_string())?;
            r.set("generator_t_orders", fmt::list(&orders));
            let rep = chain_test(&b.module, &chain, *level, k).map_err(|e| e.to_string())?;
            r.status = Status::Answered;
            r.set("is_chain", rep.is_chain);
            r.set("failure", fmt::opt(&rep.failure));
            r.set("t_orders", fmt::list(&rep.t_orders));
            r.set("residual_floors", fmt::list(&rep.residual_floors.iter().map(fmt::bound).collect::<Vec<_>>()));
            r.set("eigen_floor", triang::EIGEN_FLOOR);
            if opts.verify {
                let again = chain_test(&b.module, &chain, *level, k).map_err(|e| e.to_string())?;
                r.set("verified", again.is_chain == rep.is_chain && again.failure == rep.failure);
            }
        }
        QueryKind::Triangulate { module: id, level, k } => {
            let b = module(doc, id)?;
            let (_, refinement, chain) = b.refined.as_ref().ok_or("not a filtered module")?;
            let k = k.unwrap_or_else(|| refinement.default_cutoff());
            r.set("level", level);
            r.set("k", k);
            r.set("induced_jumps", fmt::list(&refinement.induced_jumps));
            let t = extract_triangulation(&b.module, chain, *level, k).map_err(|e| e.to_string())?;
            r.set("parameters", fmt::list(&t.parameters.iter().map(|c| fmt::character(c, dg)).collect::<Vec<_>>()));
            r.set("flag_stable", t.flag_stable);
            if !t.flag_stable {
                r.status = Status::Inconclusive;
            }
            if opts.verify {
                let want = refinement_parameters(refinement);
                let same = want.len() == t.parameters.len()
                    && want.iter().zip(&t.parameters).all(|(a, b)| a.weight == b.weight && (a.p_value.clone() - b.p_value.clone()).vanishes());
                r.set("verified", same);
            }
        }
        QueryKind::Locus { points, params, level, k } => {
            let mut scan = Vec::new();
            for id in points {
                let b = module(doc, id)?;
                let deltas = parameters(&b, params, cfg)?;
                scan.push(ScanPoint { label: id.clone(), module: b.module, deltas });
            }
            let reps = locus_scan(&scan, *level, *k);
            r.status = Status::Answered;
            r.set("level", level);
            r.set("points", reps.len());
            let crit = |c: &Criterion| match c {
                Criterion::Unit => "unit".to_string(),
                Criterion::VanishesAtPoint => "vanishes-at-point".to_string(),
                Criterion::Vanishes => "vanishes".to_string(),
                Criterion::Inapplicable(why) => format!("inapplicable({why})"),
            };
            let columns = ["point", "cutoff", "criteria", "t_orders", "saturated", "chain", "failure", "parameters", "error"];
            let rows = reps
                .iter()
                .map(|p| {
                    vec![
                        p.label.clone(),
                        p.cutoff.to_string(),
                        fmt::list(&p.criteria.iter().map(crit).collect::<Vec<_>>()),
                        fmt::list(&p.t_orders),
                        fmt::opt(&p.saturated),
                        fmt::opt(&p.chain),
                        fmt::opt(&p.failure),
                        p.parameters.as_ref().map_or("-".into(), |ps| fmt::list(&ps.iter().map(|c| fmt::character(c, dg)).collect::<Vec<_>>())),
                        fmt::opt(&p.error),
                    ]
                })
                .collect();
            r.set("saturated_points", reps.iter().filter(|p| p.saturated == Some(true)).count());
            r.set("chain_points", reps.iter().filter(|p| p.chain == Some(true)).count());
            r.table = Some(Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows });
            if reps.iter().any(|p| p.error.is_some()) {
                r.status = Status::Inconclusive;
            }
        }
        QueryKind::Selftest { suites: which, seed } => {
            let reports = suites::run_suites(which, *seed);
            let failed: usize = reports.iter().map(|s| s.failures.len()).sum();
            let checks: usize = reports.iter().map(|s| s.checks).sum();
            r.status = if failed == 0 { Status::Certified } else { Status::Inconclusive };
            r.set("seed", seed);
            r.set("checks", checks);
            r.set("failures", failed);
            let columns = ["suite", "name", "checks", "failures", "first_failure"];
            let rows = reports
                .iter()
                .map(|s| vec![s.id.to_string(), s.name.to_string(), s.checks.to_string(), s.failures.len().to_string(), s.failures.first().cloned().unwrap_or("-".into())])
                .collect();
            r.table = Some(Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows });
        }
    }
    Ok(())
}

fn parameters(b: &Built, spec: &ParamSpec, cfg: &Config) -> Result<Vec<Character<Padic>>, String> {
    match spec {
        ParamSpec::Explicit(cs) => Ok(cs.iter().map(|c| character(c, cfg)).collect()),
        ParamSpec::Family => b.refined.as_ref().map(|(_, r, _)| family_parameters(r)).ok_or_else(|| "not a filtered module".into()),
        ParamSpec::Refinement => b.refined.as_ref().map(|(_, r, _)| refinement_parameters(r)).ok_or_else(|| "not a filtered module".into()),
    }
}

/// Integer roots in [−20, 20] of a polynomial over S, at tolerance `tol`.
pub fn integer_roots(poly: &[Trunc<Padic>], tol: i64) -> Vec<i64> {
    let mut roots = Vec::new();
    for r in -20i64..=20 {
        let x = poly[0].int_like(r);
        let mut acc = poly[poly.len() - 1].clone();
        for c in poly.iter().rev().skip(1) {
            acc = acc * x.clone() + c.clone();
        }
        if acc.vanishes() || acc.val_floor() >= tol {
            roots.push(r);
        }
    }
    roots
}
