use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::{
    BlochArgs, Command, ExtendedTameArgs, InvariantCheck, K2Args, Outcome, PhiArgs, Pic0Args, ReciprocityArgs,
    SomekawaArgs, TameArgs,
};
use crate::elliptic::EcPoint;
use crate::error::{Error, Result};
use crate::function_field::{element_string, Curve, FuncElement};
use crate::literal::{
    parse_curve, parse_element, parse_function, parse_group, parse_place, parse_poly, parse_symbol_entries, split_top,
};
use crate::milnor_k::{steinberg_k2_oracle, tame, weil_check};
use crate::poly::PolyRing;
use crate::semiabelian::{GPoint, SemiAbelian};
use crate::somekawa::{
    bloch_v_approx, phi_homotopy_check, random_homotopy_shapes, ConfigFile, HomotopyShape, SecondMap, SomekawaApprox,
    TruncationConfig,
};

type CmdResult = std::result::Result<Outcome, (Value, Error)>;

fn echo<T: Serialize + ?Sized>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn with_config(config: Value, f: impl FnOnce() -> Result<(Value, Vec<InvariantCheck>)>) -> CmdResult {
    match f() {
        Ok((results, checks)) => Ok(Outcome { config, results, checks }),
        Err(e) => Err((config, e)),
    }
}

pub(super) fn dispatch(cmd: &Command, seed: u64, threads: Option<usize>) -> CmdResult {
    match cmd {
        Command::Tame(a) => with_config(echo(a), || run_tame(a)),
        Command::ExtendedTame(a) => with_config(echo(a), || run_extended_tame(a)),
        Command::Reciprocity(a) => with_config(echo(a), || run_reciprocity(a)),
        Command::K2Oracle(a) => with_config(echo(a), || run_k2(a)),
        Command::Somekawa(a) => run_somekawa(a, seed, threads),
        Command::Pic0(a) => with_config(echo(a), || run_pic0(a, seed)),
        Command::BlochV(a) => with_config(echo(a), || run_bloch(a, seed, threads)),
        Command::PhiCheck(a) => run_phi(a, seed, threads),
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn to_json<T: Serialize + ?Sized>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

// ---- symbols ----

fn run_tame(a: &TameArgs) -> Result<(Value, Vec<InvariantCheck>)> {
    let c = parse_curve(&a.field)?;
    let v = parse_place(&c, &a.place)?;
    let entries = parse_symbol_entries(&a.symbol)?.iter().map(|s| parse_function(&c, s)).collect::<Result<Vec<_>>>()?;
    let r = tame(&c, &v, &entries)?;
    let kv = v.residue_field();
    let mut out = json!({
        "place": v.literal(),
        "residue_degree": v.degree(),
        "residue": r.as_unit().map(|u| format!("{{{}}}", element_string(kv, u))).unwrap_or_else(|| r.format()),
    });
    if let Some(n) = r.as_integer() {
        out["value"] = json!(n);
    } else if let Some(u) = r.as_unit() {
        out["value"] = json!(element_string(kv, u));
        out["order"] = json!(kv.element_order(u));
    }
    Ok((out, Vec::new()))
}

fn parse_point(c: &Curve, g: &SemiAbelian, torus: &str, ell: Option<&str>) -> Result<GPoint<FuncElement>> {
    let ts: Vec<FuncElement> = split_top(torus, ',')
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(|s| parse_function(c, &s))
        .collect::<Result<_>>()?;
    let e = match ell.map(str::trim) {
        None => None,
        Some("O") => Some(EcPoint::Infinity),
        Some(s) => {
            let body = s
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected O or (f, g), got `{s}`")))?;
            let xy = split_top(body, ',');
            if xy.len() != 2 {
                return Err(Error::Parse("an elliptic coordinate has two entries".into()));
            }
            Some(EcPoint::Affine(parse_function(c, &xy[0])?, parse_function(c, &xy[1])?))
        }
    };
    let p = GPoint { torus: ts, ell: e };
    if p.torus.len() != g.torus_rank() || p.ell.is_some() != g.has_elliptic() {
        return Err(Error::Parse(format!("the point does not have the shape of {}", g.literal())));
    }
    if !g.contains_over(c, &p)? {
        return Err(Error::Parse(format!("the point is not on {} over {}", g.literal(), c.literal())));
    }
    Ok(p)
}

fn run_extended_tame(a: &ExtendedTameArgs) -> Result<(Value, Vec<InvariantCheck>)> {
    let c = parse_curve(&a.field)?;
    let g = parse_group(c.base_field(), &a.group)?;
    let v = parse_place(&c, &a.place)?;
    let p = parse_point(&c, &g, &a.torus, a.ell.as_deref())?;
    let h = parse_function(&c, &a.h)?;
    let s = g.extended_tame(&c, &v, &p, &h)?;
    let out = json!({
        "place": v.literal(),
        "residue_degree": v.degree(),
        "ord_h": c.ord(&v, &h)?,
        "r": g.r_map(&c, &v, &p)?,
        "value": g.format_point(v.residue_field(), &s),
    });
    Ok((out, Vec::new()))
}

fn run_reciprocity(a: &ReciprocityArgs) -> Result<(Value, Vec<InvariantCheck>)> {
    let c = parse_curve(&a.field)?;
    let bound = a.bound.unwrap_or(c.max_residue_degree());
    let k = c.base_field();
    if let Some(sym) = &a.symbol {
        let entries = parse_symbol_entries(sym)?;
        if entries.len() != 2 {
            return Err(Error::Parse("reciprocity takes a symbol {f,g} of length 2".into()));
        }
        let f = parse_function(&c, &entries[0])?;
        let g = parse_function(&c, &entries[1])?;
        let r = weil_check(&c, &f, &g, bound)?;
        let ok = r.product == k.one();
        let out = json!({ "product": element_string(k, r.product), "factors": to_json(&r.factors) });
        return Ok((out, vec![InvariantCheck::new("weil_reciprocity", ok, format!("{} places", r.factors.len()))]));
    }
    let (Some(group), Some(h)) = (&a.group, &a.h) else {
        return Err(Error::Parse("give --symbol, or --group with --h".into()));
    };
    let g = parse_group(k, group)?;
    let p = parse_point(&c, &g, &a.torus, a.ell.as_deref())?;
    let h = parse_function(&c, h)?;
    let s = g.reciprocity_sum(&c, &p, &h, bound)?;
    let ok = g.is_identity(k, &s);
    let out = json!({ "sum": g.format_point(k, &s) });
    Ok((out, vec![InvariantCheck::new("extended_reciprocity", ok, "sum of normed extended tame symbols")]))
}

fn run_k2(a: &K2Args) -> Result<(Value, Vec<InvariantCheck>)> {
    let g = steinberg_k2_oracle(a.q)?;
    let out = json!({
        "group": if g.is_trivial() { "trivial group".to_string() } else { g.to_string() },
        "invariants": g.invariants().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "trivial": g.is_trivial(),
    });
    Ok((out, Vec::new()))
}

// ---- presentations ----

fn load_config(path: &str) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

/// The config file with CLI overrides; threads are not part of the echo.
fn resolve(
    path: &str,
    seed: u64,
    threads: Option<usize>,
) -> std::result::Result<(TruncationConfig, Value), (Value, Error)> {
    let mut file = load_config(path).map_err(|e| (json!({ "config": path }), e))?;
    let threads = threads.or(file.threads).unwrap_or_else(default_threads);
    file.threads = None;
    file.seed = Some(file.seed.unwrap_or(seed));
    let echo = to_json(&file);
    let cfg = TruncationConfig::from_file(&file).map_err(|e| (echo.clone(), e))?.with_threads(threads);
    Ok((cfg, echo))
}

fn run_somekawa(a: &SomekawaArgs, seed: u64, threads: Option<usize>) -> CmdResult {
    let (cfg, config) = resolve(&a.config, seed, threads)?;
    with_config(config, || {
        let b = SomekawaApprox::build(&cfg)?;
        let mut checks = vec![InvariantCheck::new(
            "reciprocity_invariant",
            true,
            format!("{} slot checks on admitted relations", b.stats().reciprocity_checks),
        )];
        match b.verify_r1_rows() {
            Ok(n) => checks.push(InvariantCheck::new("r1_independent_recomputation", true, format!("{n} rows"))),
            Err(Error::Invariant(m)) => checks.push(InvariantCheck::new("r1_independent_recomputation", false, m)),
            Err(e) => return Err(e),
        }
        let mut out = json!({
            "group": b.group().to_string(),
            "invariants": b.group().invariants().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "order": b.group().order().map(|o| o.to_string()),
            "stats": to_json(b.stats()),
            "rejections": to_json(b.rejections()),
        });
        if cfg.rank() == 1 {
            let r = b.check_r1_collapse()?;
            checks.push(InvariantCheck::new(
                "norm_collapse_kills_relations",
                r.failures.is_empty(),
                format!("{} rows", r.rows_checked),
            ));
            out["collapse"] = to_json(&r);
        }
        if a.stabilize {
            let next = SomekawaApprox::build(&TruncationConfig { degree_bound: cfg.degree_bound + 1, ..cfg.clone() })?;
            out["stabilization"] = json!({
                "d": cfg.degree_bound,
                "d_next": cfg.degree_bound + 1,
                "groups": [b.group().to_string(), next.group().to_string()],
                "stable": b.group().isomorphic(next.group()),
            });
        }
        if a.rows {
            out["rows"] = to_json(b.rows());
        }
        Ok((out, checks))
    })
}

fn run_pic0(a: &Pic0Args, seed: u64) -> Result<(Value, Vec<InvariantCheck>)> {
    let c = parse_curve(&a.curve)?;
    let pic = c.pic0_structure()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut trivial, mut checked, mut skipped) = (0, 0, 0);
    while checked < a.samples {
        let f = c.random_element(&mut rng, a.degree);
        let d = match c.divisor(&f) {
            Ok(d) => d,
            Err(Error::DegreeOverflow { .. } | Error::FieldTooLarge { .. }) if skipped < 100 * a.samples.max(1) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        checked += 1;
        let ok = d.degree() == 0 && (!c.is_elliptic() || c.divisor_class(&d)?.is_infinity());
        trivial += ok as usize;
    }
    let mut checks = vec![InvariantCheck::new(
        "abel",
        trivial == a.samples,
        format!("{trivial} of {} principal divisors trivial", a.samples),
    )];
    let mut out = json!({ "structure": pic.to_string(), "order": pic.order().map(|o| o.to_string()), "samples": a.samples, "resampled": skipped });
    if c.is_elliptic() {
        let n = c.rational_points()?.order();
        out["rational_points"] = json!(n);
        let ok = pic.order().is_some_and(|o| o == n.into());
        checks.push(InvariantCheck::new("pic0_order_matches_points", ok, format!("{n} points")));
    }
    Ok((out, checks))
}

fn run_bloch(a: &BlochArgs, seed: u64, threads: Option<usize>) -> Result<(Value, Vec<InvariantCheck>)> {
    let c = parse_curve(&a.curve)?;
    let h = a.h_bound.unwrap_or(a.d);
    let (v, rep) = bloch_v_approx(&c, a.d, h, a.stabilize, threads.unwrap_or_else(default_threads), seed)?;
    let kills = rep.comparison.kills_all_rows;
    let detail = format!("{} rows", rep.comparison.rows_checked);
    let out = json!({ "v_group": v.to_string(), "report": to_json(&rep) });
    Ok((out, vec![InvariantCheck::new("comparison_kills_relations", kills, detail)]))
}

// ---- homotopy ----

fn parse_second(k: &crate::finite_field::FieldExtension, s: &str) -> Result<SecondMap> {
    match s.trim().split_once(':') {
        Some(("const", c)) => Ok(SecondMap::Constant(parse_element(k, c)?)),
        Some(("power", e)) => {
            Ok(SecondMap::Power(e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent `{e}`")))?))
        }
        _ => Err(Error::Parse(format!("expected const:c or power:e, got `{s}`"))),
    }
}

fn describe(shape: &HomotopyShape, k: &crate::finite_field::FieldExtension) -> String {
    let sec = |s: &Option<SecondMap>| match s {
        None => String::new(),
        Some(SecondMap::Constant(c)) => format!("; f2 = {}", element_string(k, *c)),
        Some(SecondMap::Power(e)) => format!("; f2 = u^{e}"),
    };
    match shape {
        HomotopyShape::ConstantSection { .. } => "constant section".into(),
        HomotopyShape::TorusHypersurface { coeffs, second } => {
            let r = PolyRing::new(k);
            let cs: Vec<String> =
                coeffs.iter().map(|c| crate::function_field::format_poly(r.field(), c, "t")).collect();
            format!("u-coefficients [{}]{}", cs.join("; "), sec(second))
        }
        HomotopyShape::EllipticFunction { curve, h, second } => format!("p = {}{}", curve.format(h), sec(second)),
    }
}

fn run_phi(a: &PhiArgs, seed: u64, threads: Option<usize>) -> CmdResult {
    let (cfg, mut config) = resolve(&a.config, seed, threads)?;
    config["family"] = echo(a);
    with_config(config, || {
        let b = SomekawaApprox::build(&cfg)?;
        let k = cfg.base.clone();
        let second = a.second.as_deref().map(|s| parse_second(&k, s)).transpose()?;
        let shapes = match (&a.random, &a.coeffs, &a.h) {
            (Some(n), None, None) => random_homotopy_shapes(&b, *n, &mut ChaCha8Rng::seed_from_u64(seed))?,
            (None, Some(cs), None) => {
                let line = Curve::rational_line(&k)?;
                let coeffs = split_top(cs, ';').iter().map(|s| parse_poly(&line, s)).collect::<Result<Vec<_>>>()?;
                vec![HomotopyShape::TorusHypersurface { coeffs, second }]
            }
            (None, None, Some(h)) => {
                let curve = cfg.groups[0]
                    .elliptic_curve()?
                    .ok_or_else(|| Error::UnsupportedShape("--h needs an elliptic first slot".into()))?;
                let h = parse_function(&curve, h)?;
                vec![HomotopyShape::EllipticFunction { curve, h, second }]
            }
            _ => return Err(Error::Parse("give exactly one of --coeffs, --h, --random".into())),
        };
        let mut instances = Vec::new();
        let (mut equal, mut checked, mut skipped) = (0, 0, 0);
        for z in &shapes {
            match phi_homotopy_check(&b, z) {
                Ok(r) => {
                    checked += 1;
                    equal += r.equal as usize;
                    instances.push(json!({ "family": describe(z, &k), "report": to_json(&r) }));
                }
                Err(e @ (Error::DegreeOverflow { .. } | Error::UnsupportedShape(_))) if a.random.is_some() => {
                    skipped += 1;
                    instances.push(json!({ "family": describe(z, &k), "skipped": e.to_string() }));
                }
                Err(e) => return Err(e),
            }
        }
        let out = json!({
            "group": b.group().to_string(),
            "checked": checked,
            "skipped": skipped,
            "instances": instances,
        });
        Ok((
            out,
            vec![InvariantCheck::new("phi0_equals_phi1", equal == checked, format!("{equal} of {checked} instances"))],
        ))
    })
}
