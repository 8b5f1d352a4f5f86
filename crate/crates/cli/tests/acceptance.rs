//! One line per acceptance criterion, then a single assertion over all of them.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use teamsem_core::constructions::{
    entropy, lift_counts, measurement_prior, outcome_conditional, probabilistic_lift,
    search_probabilistic_realization, ProbeConfig,
};
use teamsem_core::derivation::{
    entail, soundness_fuzz, AtomFact, EntailConfig, Rule, Schema, Semantics,
};
use teamsem_core::formula::indep_atom_holds;
use teamsem_core::nogo::{self, KsSpec, DEFAULT_INSTRUCTION_CAP};
use teamsem_core::properties::{locality_holds, prob_locality_holds};
use teamsem_core::random::{
    random_local_team, random_prob_team, random_structural_team, random_zi_team,
};
use teamsem_core::rational::q;
use teamsem_core::value::vars;
use teamsem_core::{
    check, check_prob, eval_possibilistic, eval_probabilistic, parse, EvalContext, Formula,
    ProbTeam, Property, Row, Team, Value, Verdict, Q,
};
use teamsem_quantum::{chsh, epr_system, game_to_team, ghz_system, hardy_system, quantum_team};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Duration, limit: Duration) -> Result<(), String> {
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

/// Fastest of a few runs, so a scheduler hiccup does not decide a sub-millisecond bound.
fn fastest<T>(runs: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = None;
    let mut out = None;
    for _ in 0..runs {
        let t = Instant::now();
        let v = f();
        let d = t.elapsed();
        if best.is_none_or(|b| d < b) {
            best = Some(d);
        }
        out = Some(v);
    }
    (out.unwrap(), best.unwrap())
}

fn ints(names: &[&str], rows: &[&[i64]]) -> Team {
    Team::ints(names, rows).unwrap()
}

fn c01_intro_atom() -> Outcome {
    let x = ints(
        &["x0", "y0", "x1", "y1"],
        &[
            &[0, 1, 0, 1],
            &[0, 1, 1, 2],
            &[0, 1, 1, 7],
            &[0, 5, 1, 2],
            &[0, 5, 1, 7],
            &[1, 5, 1, 1],
        ],
    );
    let (holds, t) = fastest(5, || {
        indep_atom_holds(&x, &["y0"], &["x0", "x1"], &["y1"]).unwrap()
    });
    ensure(holds, "atom fails")?;
    within(t, Duration::from_millis(1))?;
    Ok(format!("6 rows satisfy y0 _||_ y1 | x0 x1 in {t:?}"))
}

fn c02_epr() -> Outcome {
    let x = nogo::epr_team();
    let phi = parse(r"Eh z.(=(z) /\ y0 _||_ y1 | x0 x1 z)").unwrap();
    let t = Instant::now();
    let v = eval_possibilistic(&x, &phi, &EvalContext::default().with_k_max(1))
        .map_err(|e| e.to_string())?;
    let d = t.elapsed();
    ensure(v == Verdict::False, format!("verdict {v}"))?;
    within(d, Duration::from_secs(1))?;
    Ok(format!("exact false at k_max = 1 in {d:?}"))
}

fn no_model(x: &Team, want_searched: u128) -> Outcome {
    let t = Instant::now();
    let rep = nogo::verify_no_local_model(x, DEFAULT_INSTRUCTION_CAP).map_err(|e| e.to_string())?;
    let d = t.elapsed();
    ensure(rep.no_model(), "a local model exists")?;
    ensure(
        rep.searched == want_searched,
        format!("searched {}", rep.searched),
    )?;
    within(d, Duration::from_secs(1))?;
    Ok(format!(
        "{} instructions, {} consistent, no model, {d:?}",
        rep.searched,
        rep.consistent.len()
    ))
}

fn c03_ghz() -> Outcome {
    let x = nogo::ghz_team_minimal();
    ensure(nogo::is_ghz_team(&x).unwrap(), "not a GHZ team")?;
    no_model(&x, 64)
}

fn c04_hardy() -> Outcome {
    let x = nogo::hardy_team_minimal();
    ensure(nogo::is_hardy_team(&x).unwrap(), "not a Hardy team")?;
    no_model(&x, 16)
}

fn c05_ks() -> Outcome {
    let spec = KsSpec::standard();
    let t = Instant::now();
    let none = nogo::verify_no_noncontextual(&spec);
    let d = t.elapsed();
    ensure(none, "a noncontextual assignment exists")?;
    ensure(
        (spec.q.len() as u64).pow(spec.p.len() as u32) == 262_144,
        "wrong search size",
    )?;
    ensure(
        spec.p.len() == 9 && spec.double_cover() && spec.parity_obstruction(),
        "parity check",
    )?;
    within(d, Duration::from_secs(1))?;
    Ok(format!(
        "4^9 assignments exhausted in {d:?}; 9 tuples vs even double cover"
    ))
}

fn c06_epr_preset() -> Outcome {
    let s = epr_system();
    let p = s.outcome_distribution(&[0, 1]).map_err(|e| e.to_string())?;
    let want = [0.0, 0.5, 0.5, 0.0];
    ensure(p.len() == 4, "four outcomes")?;
    for ((_, got), w) in p.iter().zip(want) {
        ensure((got - w).abs() < 1e-12, format!("p = {got}, want {w}"))?;
    }
    let pt = quantum_team(&s).map_err(|e| e.to_string())?;
    ensure(
        pt.collapse() == nogo::epr_team(),
        "collapse differs from the EPR team",
    )?;
    Ok("(0, 1/2, 1/2, 0); collapse is the EPR team".into())
}

fn c07_ghz_preset() -> Outcome {
    let s = ghz_system();
    ensure(s.measurements.len() == 8, "eight measurement triples")?;
    for a in &s.measurements {
        let sa: i64 = a.iter().sum();
        for (b, p) in s.outcome_distribution(a).map_err(|e| e.to_string())? {
            let odd = b.iter().sum::<i64>() % 2 == 1;
            let want = match (sa, odd) {
                (0, true) | (2, false) => 0.25,
                (0, false) | (2, true) => 0.0,
                _ => 0.125,
            };
            ensure((p - want).abs() < 1e-12, format!("a={a:?} b={b:?} p={p}"))?;
        }
    }
    let x = quantum_team(&s).map_err(|e| e.to_string())?.collapse();
    ensure(nogo::is_ghz_team(&x).unwrap(), "collapse is not a GHZ team")?;
    Ok(format!(
        "{} settings checked; collapse ({} rows) is a GHZ team",
        s.measurements.len(),
        x.len()
    ))
}

fn c08_hardy_preset() -> Outcome {
    let s = hardy_system();
    let table = [
        [q(9, 100), q(27, 200), q(27, 200), q(16, 25)],
        [q(0, 1), q(9, 40), q(5, 8), q(3, 20)],
        [q(0, 1), q(5, 8), q(9, 40), q(3, 20)],
        [q(1, 4), q(3, 8), q(3, 8), q(0, 1)],
    ];
    for (a, row) in [[0, 0], [0, 1], [1, 0], [1, 1]].iter().zip(&table) {
        let p = s.outcome_distribution(a).map_err(|e| e.to_string())?;
        for ((b, got), want) in p.iter().zip(row) {
            let w = teamsem_core::rational::to_f64(want);
            ensure(
                (got - w).abs() < 1e-9,
                format!("a={a:?} b={b:?} p={got} want {w}"),
            )?;
        }
    }
    let x = quantum_team(&s).map_err(|e| e.to_string())?.collapse();
    let printed = ints(
        &["x0", "x1", "y0", "y1"],
        &[
            &[0, 0, 0, 0],
            &[0, 0, 0, 1],
            &[0, 0, 1, 0],
            &[0, 0, 1, 1],
            &[0, 1, 0, 1],
            &[0, 1, 1, 0],
            &[0, 1, 1, 1],
            &[1, 0, 0, 1],
            &[1, 0, 1, 0],
            &[1, 0, 1, 1],
            &[1, 1, 0, 0],
            &[1, 1, 0, 1],
            &[1, 1, 1, 0],
        ],
    );
    ensure(
        nogo::is_hardy_team(&x).unwrap(),
        "collapse is not a Hardy team",
    )?;
    ensure(x == printed, "collapse differs from the 13-row table")?;
    Ok("4x4 table within 1e-9; collapse is the 13-row Hardy team".into())
}

fn c09_pns() -> Outcome {
    let x = nogo::ns_counterexample_team();
    ensure(x.len() == 12, "12 rows")?;
    ensure(
        check(Property::NS, &x).map_err(|e| e.to_string())?,
        "team is not NS",
    )?;
    let cfg = ProbeConfig {
        restarts: 10_000,
        seed: 7,
        ..ProbeConfig::default()
    };
    let t = Instant::now();
    let res =
        search_probabilistic_realization(&x, &[Property::NS], &cfg).map_err(|e| e.to_string())?;
    let d = t.elapsed();
    ensure(res.witness.is_none(), "probe found a witness")?;
    ensure(res.residual >= 1e-6, format!("residual {}", res.residual))?;
    within(d, Duration::from_secs(60))?;
    Ok(format!(
        "NS holds; {} restarts, smallest residual {:.4} in {d:.1?}",
        cfg.restarts, res.residual
    ))
}

fn c10_lift() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in 0..1000 {
        let (n, l) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let x = random_zi_team(&mut rng, n, l, 2);
        let pt = probabilistic_lift(&x).map_err(|e| format!("team {k}: {e}"))?;
        ensure(pt.collapse() == x, format!("team {k}: collapse differs"))?;
        let total: Q = pt.entries().map(|(_, w)| w.clone()).sum();
        ensure(total == q(1, 1), format!("team {k}: total {total}"))?;
    }
    for k in 0..200 {
        let (n, l) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
        let x = random_local_team(&mut rng, n, l, 2);
        let pt = probabilistic_lift(&x).map_err(|e| format!("local team {k}: {e}"))?;
        for p in [Property::ML, Property::ZI, Property::Local] {
            ensure(
                check_prob(p, &pt).map_err(|e| e.to_string())?,
                format!("local team {k}: lift fails P{p}"),
            )?;
        }
    }
    Ok("1000 zI teams: collapse and total exact; 200 local teams: PML, PzI, PLOCAL".into())
}

fn section_entropies(pt: &ProbTeam, keys: &[(Row, Row)]) -> (f64, Vec<f64>) {
    let theta = measurement_prior(pt).unwrap().entropy();
    let etas = keys
        .iter()
        .map(|(a, g)| entropy(outcome_conditional(pt, a, g).unwrap().values()))
        .collect();
    (theta, etas)
}

fn c11_max_entropy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut compared = 0;
    for k in 0..20 {
        let x = random_zi_team(&mut rng, 2, 1, 2);
        let nx = x.names_with_role(teamsem_core::Role::Measurement).len();
        let keys: Vec<(Row, Row)> = lift_counts(&x)
            .unwrap()
            .m_o
            .keys()
            .map(|key| (key[..nx].to_vec(), key[nx..].to_vec()))
            .collect();
        let (theta, etas) = section_entropies(&probabilistic_lift(&x).unwrap(), &keys);
        for _ in 0..100 {
            let pairs = x
                .rows()
                .map(|r| (r.clone(), Q::from_integer(rng.gen_range(1..=20).into())));
            let other = ProbTeam::normalized(x.vars().to_vec(), pairs).unwrap();
            let (t2, e2) = section_entropies(&other, &keys);
            ensure(
                t2 <= theta + 1e-12,
                format!("team {k}: H(theta) {t2} > {theta}"),
            )?;
            for (a, b) in e2.iter().zip(&etas) {
                ensure(
                    *a <= b + 1e-12,
                    format!("team {k}: section entropy {a} > {b}"),
                )?;
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} realizations dominated by the lift"))
}

fn c12_fuzz() -> Outcome {
    let trials = 2000;
    let mut runs: Vec<(String, Schema, Semantics)> = Vec::new();
    for r in Rule::AXIOMS {
        runs.push((
            format!("rule {}", r.number()),
            Schema::Axiom(r),
            Semantics::Possibilistic,
        ));
        runs.push((
            format!("rule {} (prob)", r.number()),
            Schema::Axiom(r),
            Semantics::Probabilistic,
        ));
    }
    for p in 1..=5 {
        runs.push((
            format!("P{p}"),
            Schema::Separoid(p),
            Semantics::Probabilistic,
        ));
    }
    runs.push((
        "team Studeny rule".into(),
        Schema::StudenyTeam,
        Semantics::Possibilistic,
    ));
    runs.push((
        "probabilistic Studeny rule".into(),
        Schema::StudenyProbabilistic,
        Semantics::Probabilistic,
    ));
    let reports: Vec<_> = runs
        .par_iter()
        .enumerate()
        .map(|(i, (name, schema, sem))| {
            let mut rng = ChaCha8Rng::seed_from_u64(1200 + i as u64);
            (
                name.clone(),
                soundness_fuzz(*schema, trials, *sem, &mut rng),
            )
        })
        .collect();
    for (name, rep) in &reports {
        ensure(
            rep.trials == trials,
            format!("{name}: {} trials", rep.trials),
        )?;
        ensure(
            rep.counterexamples.is_empty(),
            format!("{name}: {}", rep.counterexamples.join("; ")),
        )?;
        ensure(rep.nonvacuous > 0, format!("{name}: premises never held"))?;
    }
    Ok(format!(
        "{} schemas x {trials} trials, no counterexamples",
        reports.len()
    ))
}

fn facts(src: &[&str]) -> Vec<AtomFact> {
    src.iter()
        .flat_map(|s| AtomFact::from_conjunction(&parse(s).unwrap()).unwrap())
        .collect()
}

fn c13_derivations() -> Outcome {
    let wd = ["=(x0 x1 z; y0)", "=(x0 x1 z; y1)"];
    let sd = ["=(x0 z; y0)", "=(x1 z; y1)"];
    let pi = ["x1 _||_ y0 | x0 z", "x0 _||_ y1 | x1 z"];
    let piwd: Vec<&str> = pi.iter().chain(&wd).copied().collect();
    let cases: [(&str, &[&str], &[&str]); 3] = [
        ("WD |- OI", &wd, &["y0 _||_ y1 | x0 x1 z"]),
        ("SD |- PI", &sd, &pi),
        ("PI, WD |- SD", &piwd, &sd),
    ];
    let cfg = EntailConfig {
        depth: 6,
        ..EntailConfig::default()
    };
    let mut shown = Vec::new();
    for (name, prem, goals) in cases {
        let prem = facts(prem);
        let t = Instant::now();
        let mut steps = 0;
        for g in facts(goals) {
            let res = entail(&prem, &g, &cfg).map_err(|e| e.to_string())?;
            let d = res
                .derivation()
                .ok_or_else(|| format!("{name}: {g} not derived"))?;
            d.replay(&prem).map_err(|e| format!("{name}: {e}"))?;
            steps += d.len();
        }
        let took = t.elapsed();
        within(took, Duration::from_secs(5)).map_err(|e| format!("{name}: {e}"))?;
        shown.push(format!("{name} ({steps} steps)"));
    }
    Ok(shown.join(", "))
}

/// Disjunctions only join dependence formulas, the fragment where
/// probabilistic disjunction is defined.
fn random_qf(rng: &mut ChaCha8Rng, names: &[&str], depth: usize, flat: bool) -> Formula {
    let pick = |rng: &mut ChaCha8Rng| -> Vec<&str> {
        names
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.4))
            .collect()
    };
    let one = |rng: &mut ChaCha8Rng| names[rng.gen_range(0..names.len())].to_string();
    let lo = if flat { 1 } else { 0 };
    let choice = if depth == 0 {
        rng.gen_range(lo..5)
    } else {
        rng.gen_range(lo..7)
    };
    match choice {
        0 => Formula::indep(&pick(rng), &pick(rng), &pick(rng)),
        1 => Formula::dep(&pick(rng), &pick(rng)),
        2 => Formula::constant(&pick(rng)),
        3 => Formula::Eq(one(rng), one(rng)),
        4 => Formula::Neq(one(rng), one(rng)),
        5 => Formula::And(vec![
            random_qf(rng, names, depth - 1, flat),
            random_qf(rng, names, depth - 1, flat),
        ]),
        _ => Formula::Or(vec![
            random_qf(rng, names, depth - 1, true),
            random_qf(rng, names, depth - 1, true),
        ]),
    }
}

fn c14_collapse() -> Outcome {
    let names = ["a", "b", "c", "d"];
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut held = 0;
    for k in 0..2000 {
        let pt = random_prob_team(&mut rng, &names, 2, 6, 4);
        let phi = random_qf(&mut rng, &names, 2, false);
        let ctx = EvalContext::default();
        if eval_probabilistic(&pt, &phi, &ctx).map_err(|e| format!("pair {k}: {e}"))? {
            held += 1;
            let v = eval_possibilistic(&pt.collapse(), &phi, &ctx)
                .map_err(|e| format!("pair {k}: {e}"))?;
            ensure(
                v.is_true(),
                format!("pair {k}: {phi} holds on the team but not on its collapse"),
            )?;
        }
    }
    ensure(held > 0, "no formula held")?;
    Ok(format!("2000 pairs ({held} satisfied), no violation"))
}

fn c15_locality() -> Outcome {
    let names = ["x0", "x1", "y0", "y1", "z"];
    let universe: Vec<Row> = (0..32u32)
        .map(|m| {
            (0..5)
                .map(|b| Value::Int(((m >> (4 - b)) & 1) as i64))
                .collect()
        })
        .collect();
    // All subsets of at most 5 of the 32 rows, as index combinations.
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier = combos.clone();
    for _ in 0..5 {
        let mut next = Vec::new();
        for c in &frontier {
            for j in c.last().map_or(0, |&l| l + 1)..universe.len() {
                let mut c2 = c.clone();
                c2.push(j);
                next.push(c2);
            }
        }
        combos.extend(next.iter().cloned());
        frontier = next;
    }
    let mismatches: Vec<String> = combos
        .par_iter()
        .filter_map(|c| {
            let t = Team::from_rows(vars(&names), c.iter().map(|&i| universe[i].clone())).unwrap();
            let local = locality_holds(&t).unwrap();
            let formula = check(Property::PI, &t).unwrap() && check(Property::OI, &t).unwrap();
            (local != formula).then(|| format!("{c:?}"))
        })
        .collect();
    ensure(
        mismatches.is_empty(),
        format!("possibilistic mismatch on {}", mismatches.join(" ")),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut local_count = 0;
    for k in 0..10_000 {
        let pt = match k % 3 {
            0 => random_structural_team(&mut rng, 2, 2, true),
            1 => random_structural_team(&mut rng, 2, 2, false),
            _ => random_prob_team(&mut rng, &names, 2, 8, 4),
        };
        let local = prob_locality_holds(&pt).map_err(|e| e.to_string())?;
        let formula = check_prob(Property::PI, &pt).map_err(|e| e.to_string())?
            && check_prob(Property::OI, &pt).map_err(|e| e.to_string())?;
        ensure(
            local == formula,
            format!("probabilistic mismatch on team {k}"),
        )?;
        local_count += local as usize;
    }
    Ok(format!(
        "{} teams exhaustively; 10000 probabilistic teams ({local_count} local)",
        combos.len()
    ))
}

fn c16_chsh() -> Outcome {
    let t = game_to_team(&chsh());
    ensure(t.len() == 8, format!("{} rows", t.len()))?;
    for c in 0..2 {
        for d in 0..2 {
            let k = t
                .rows()
                .filter(|r| r[0] == Value::Int(c) && r[1] == Value::Int(d))
                .count();
            ensure(k == 2, format!("question pair ({c},{d}) has {k} rows"))?;
        }
    }
    Ok("8 rows, 2 per question pair".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 16] = [
        ("intro team satisfies y0 _||_ y1 | x0 x1", c01_intro_atom),
        ("EPR formula false at k_max = 1", c02_epr),
        ("GHZ team has no local model", c03_ghz),
        ("Hardy team has no local model", c04_hardy),
        ("Kochen-Specker search and parity", c05_ks),
        ("EPR quantum preset", c06_epr_preset),
        ("GHZ quantum preset", c07_ghz_preset),
        ("Hardy quantum preset", c08_hardy_preset),
        ("NS team without probabilistic NS", c09_pns),
        ("probabilistic lift", c10_lift),
        ("maximum entropy of the lift", c11_max_entropy),
        ("soundness fuzz", c12_fuzz),
        ("derivations of WD/OI, SD/PI, PI+WD/SD", c13_derivations),
        ("collapse preservation", c14_collapse),
        ("locality equivalences", c15_locality),
        ("CHSH reduction", c16_chsh),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:2} FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
