use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use nilcover::baer::{baer_formula, compare, BaerEngine, BaerInput};
use nilcover::collect::{left_normed, make_context_capped, parse_word, NilElement, NilGroupCtx};
use nilcover::cover::{
    construct_c1_cover, exhaustive_search_bounded, stem_cover_verdict, summarize, DEFAULT_SEARCH_ORDER,
};
use nilcover::fingroup::{Pcp, MAX_TABLE_ORDER};
use nilcover::hall::{generate_hall_basis_capped, witt_count, DEFAULT_BASIS_CAP};
use nilcover::lattice::{smith_normal_form, IntMatrix};
use nilcover::{Error, Result};

use crate::output::{big, emit, Envelope, EXIT_INCONSISTENT, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE};
use crate::{
    BaerArgs, Cli, Command, ConstructArgs, CoverArgs, CoverCommand, HallArgs, Method, NfArgs, PcpArgs, SearchArgs,
    SelftestArgs,
};

struct Outcome {
    input: Value,
    result: Value,
    status: u8,
}

impl Outcome {
    fn ok(input: Value, result: Value) -> Self {
        Outcome { input, result, status: EXIT_OK }
    }
}

fn echo(args: &impl Serialize, extra: &[(&str, Value)]) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(map) = &mut v {
        for (k, x) in extra {
            map.insert((*k).to_string(), x.clone());
        }
    }
    v
}

pub fn dispatch(cli: &Cli) -> u8 {
    let start = Instant::now();
    let (name, outcome) = match &cli.command {
        Command::Hall(a) => ("hall", hall(cli, a)),
        Command::Nf(a) => ("nf", nf(cli, a)),
        Command::Baer(a) => ("baer", baer(a)),
        Command::Pcp(a) => ("pcp", pcp(cli, a)),
        Command::Cover(CoverCommand::Verdict(a)) => ("cover verdict", verdict(a)),
        Command::Cover(CoverCommand::Construct(a)) => ("cover construct", construct(cli, a)),
        Command::Cover(CoverCommand::Search(a)) => ("cover search", search(cli, a)),
        Command::Selftest(a) => ("selftest", selftest(cli, a)),
    };
    match outcome {
        Ok(o) => {
            emit(
                &Envelope {
                    subcommand: name,
                    input: o.input,
                    result: o.result,
                    elapsed_ms: start.elapsed().as_millis(),
                    version: env!("CARGO_PKG_VERSION"),
                },
                cli.json,
            );
            o.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceLimit { .. } => EXIT_RESOURCE,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn basis_cap(cli: &Cli) -> usize {
    cli.max_basis.unwrap_or(DEFAULT_BASIS_CAP)
}

fn hall(cli: &Cli, a: &HallArgs) -> Result<Outcome> {
    let basis = generate_hall_basis_capped(a.letters, a.weight, basis_cap(cli))?;
    let witt = (1..=a.weight)
        .map(|m| witt_count(a.letters, m))
        .collect::<Result<Vec<_>>>()?;
    let mut result = json!({
        "counts": basis.counts(),
        "witt": witt,
        "total": basis.len(),
    });
    if !a.count_only {
        result["basis"] = (0..basis.len())
            .map(|i| json!({ "index": i + 1, "weight": basis.weight(i), "bracket": basis.commutator(i).to_string() }))
            .collect();
    }
    Ok(Outcome::ok(echo(a, &[("max_basis", json!(basis_cap(cli)))]), result))
}

fn nf(cli: &Cli, a: &NfArgs) -> Result<Outcome> {
    let ctx = make_context_capped(a.letters, a.class, basis_cap(cli))?;
    let g = parse_word(&ctx, &a.expr)?;
    let basis = ctx.basis();
    let terms: Vec<Value> = g
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.sign() != num_bigint::Sign::NoSign)
        .map(|(i, e)| {
            json!({ "index": i + 1, "basic": basis.commutator(i).to_string(), "weight": basis.weight(i), "exponent": big(e) })
        })
        .collect();
    let result = json!({
        "normal_form": g.to_string(),
        "exponents": g.exponents().iter().map(big).collect::<Vec<_>>(),
        "terms": terms,
    });
    Ok(Outcome::ok(echo(a, &[("max_basis", json!(basis_cap(cli)))]), result))
}

fn baer(a: &BaerArgs) -> Result<Outcome> {
    let input = BaerInput::new(a.r, a.s, a.c)?;
    let mut result = json!({ "d": input.d(), "n": input.n()? });
    let formula = match a.method {
        Method::Engine => None,
        _ => Some(baer_formula(&input)?),
    };
    let engine = match a.method {
        Method::Formula => None,
        _ => Some(BaerEngine::default().compute(&input)?),
    };
    let shown = engine.as_ref().or(formula.as_ref()).expect("at least one method runs");
    result["invariants"] = json!(shown.invariants);
    result["free_rank"] = json!(shown.free_rank);
    result["group"] = json!(shown.to_string());
    let mut status = EXIT_OK;
    if let (Some(f), Some(e)) = (&formula, &engine) {
        result["agree"] = json!(f == e);
        if f != e {
            status = EXIT_INCONSISTENT;
        }
    }
    if let Some(f) = &formula {
        result["formula"] = json!(f);
    }
    if let Some(e) = &engine {
        result["engine"] = json!(e);
    }
    Ok(Outcome {
        input: echo(a, &[]),
        result,
        status,
    })
}

fn order_cap(cli: &Cli, default: usize) -> usize {
    cli.max_order.unwrap_or(default).min(MAX_TABLE_ORDER)
}

fn pcp(cli: &Cli, a: &PcpArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.file)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", a.file.display())))?;
    let pcp = Pcp::parse(&text)?;
    let consistent = pcp.is_consistent();
    let mut result = json!({
        "p": pcp.p(),
        "m": pcp.len(),
        "consistent": consistent,
        "order": if consistent { pcp.order().map(Value::from).unwrap_or(Value::Null) } else { Value::Null },
    });
    let cap = order_cap(cli, MAX_TABLE_ORDER);
    if a.materialize {
        let order = (pcp.p() as u128).checked_pow(pcp.len() as u32).unwrap_or(u128::MAX);
        if order > cap as u128 {
            return Err(Error::ResourceLimit {
                what: "group order",
                requested: order,
                limit: cap as u128,
            });
        }
        let g = pcp.materialize()?;
        result["summary"] = json!(g.summary()?);
        result["elements"] = json!((0..g.order()).map(|x| g.label(x)).collect::<Vec<_>>());
        result["involutions"] = json!((0..g.order()).filter(|&x| g.element_order(x) == 2).count());
        if a.table {
            result["table"] = (0..g.order())
                .map(|x| (0..g.order()).map(|y| g.mul(x, y)).collect::<Vec<_>>())
                .collect();
        }
    }
    Ok(Outcome::ok(echo(a, &[("max_order", json!(cap))]), result))
}

fn verdict(a: &CoverArgs) -> Result<Outcome> {
    let v = stem_cover_verdict(&BaerInput::new(a.r, a.s, a.c)?)?;
    Ok(Outcome::ok(echo(a, &[]), json!(v)))
}

fn construct(cli: &Cli, a: &ConstructArgs) -> Result<Outcome> {
    let input = BaerInput::new(a.r, a.s, 1)?;
    let cap = order_cap(cli, MAX_TABLE_ORDER);
    let order = a.r as u128 * a.s as u128 * input.d() as u128;
    if order > cap as u128 {
        return Err(Error::ResourceLimit {
            what: "covering group order",
            requested: order,
            limit: cap as u128,
        });
    }
    let (g, kernel) = construct_c1_cover(a.r, a.s)?;
    let summary = summarize(&g, &kernel, &input)?;
    let status = if summary.is_stem_cover { EXIT_OK } else { EXIT_INCONSISTENT };
    Ok(Outcome {
        input: echo(a, &[("max_order", json!(cap))]),
        result: json!(summary),
        status,
    })
}

fn search(cli: &Cli, a: &SearchArgs) -> Result<Outcome> {
    let input = BaerInput::new(a.r, a.s, a.c)?;
    let p = match a.p {
        Some(p) => p,
        None => u32::try_from(a.r).map_err(|_| Error::InvalidArgument(format!("r = {} is not a small prime", a.r)))?,
    };
    let cap = order_cap(cli, DEFAULT_SEARCH_ORDER);
    let cert = exhaustive_search_bounded(&input, p, cap)?;
    let status = if cert.theorem_consistent { EXIT_OK } else { EXIT_INCONSISTENT };
    Ok(Outcome {
        input: echo(a, &[("p", json!(p)), ("max_order", json!(cap))]),
        result: json!(cert),
        status,
    })
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    trials: usize,
    failures: usize,
}

fn random_element(ctx: &std::sync::Arc<NilGroupCtx>, rng: &mut ChaCha8Rng) -> Result<NilElement> {
    let exps: Vec<i64> = (0..ctx.len()).map(|_| rng.gen_range(-5..=5)).collect();
    ctx.element_i64(&exps)
}

fn selftest(cli: &Cli, a: &SelftestArgs) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut checks = Vec::new();
    let cap = basis_cap(cli);

    for (k, w) in [(2, 4), (3, 3)] {
        let ctx = make_context_capped(k, w, cap)?;
        let mut axioms = 0;
        let mut hall_witt = 0;
        for _ in 0..a.trials {
            let x = random_element(&ctx, &mut rng)?;
            let y = random_element(&ctx, &mut rng)?;
            let z = random_element(&ctx, &mut rng)?;
            let assoc = x.multiply(&y)?.multiply(&z)? == x.multiply(&y.multiply(&z)?)?;
            if !assoc || !x.multiply(&x.inverse()?)?.is_identity() {
                axioms += 1;
            }
            let term = |x: &NilElement, y: &NilElement, z: &NilElement| -> Result<NilElement> {
                left_normed(&[x.clone(), y.inverse()?, z.clone()])?.conjugate(y)
            };
            let hw = term(&x, &y, &z)?.multiply(&term(&y, &z, &x)?)?.multiply(&term(&z, &x, &y)?)?;
            if !hw.is_identity() {
                hall_witt += 1;
            }
        }
        checks.push(Check { name: format!("group axioms in F({k})/gamma_{}", w + 1), trials: a.trials, failures: axioms });
        checks.push(Check { name: format!("Hall-Witt identity in F({k})/gamma_{}", w + 1), trials: a.trials, failures: hall_witt });
    }

    for c in 1..=4u32 {
        let ctx = make_context_capped(2, c + 1, cap)?;
        let mut failures = 0;
        for _ in 0..a.trials {
            let letters = (0..=c)
                .map(|_| ctx.letter(rng.gen_range(1..=2)))
                .collect::<Result<Vec<_>>>()?;
            let pos = rng.gen_range(0..letters.len());
            let k: i64 = rng.gen_range(-6..=6);
            let base = left_normed(&letters)?.layer_coords(c + 1)?;
            let mut scaled = letters.clone();
            scaled[pos] = scaled[pos].pow_i64(k)?;
            let got = left_normed(&scaled)?.layer_coords(c + 1)?;
            if got.iter().zip(&base).any(|(g, b)| g != &(b * k)) {
                failures += 1;
            }
        }
        checks.push(Check { name: format!("power extraction at class {c}"), trials: a.trials, failures });
    }

    let engine = BaerEngine::default();
    let mut failures = 0;
    for _ in 0..a.trials {
        let input = BaerInput::new(rng.gen_range(1..=30), rng.gen_range(1..=30), rng.gen_range(1..=4))?;
        if !compare(&engine, &input)?.agree {
            failures += 1;
        }
    }
    checks.push(Check { name: "Baer engine against formula".into(), trials: a.trials, failures });

    let mut failures = 0;
    for _ in 0..a.trials {
        let m: Vec<Vec<i64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
        let prod: BigInt = smith_normal_form(&IntMatrix::from_i64(&rows)?).iter().product();
        if prod != BigInt::from(det.abs()) {
            failures += 1;
        }
    }
    checks.push(Check { name: "Smith diagonal product equals |det|".into(), trials: a.trials, failures });

    let passed = checks.iter().all(|c| c.failures == 0);
    Ok(Outcome {
        input: echo(a, &[("seed", json!(cli.seed))]),
        result: json!({ "passed": passed, "checks": checks }),
        status: if passed { EXIT_OK } else { EXIT_INCONSISTENT },
    })
}
