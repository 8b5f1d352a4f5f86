use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Map, Value as Json};

use teamsem_core::constructions::{
    canonicalize_local_to_sd, entropy, extend_single_valued, lift_counts, measurement_prior,
    outcome_conditional, probabilistic_lift, realize_strong_determinism, realize_weak_det_z_indep,
    search_probabilistic_realization, team_entropy, ProbeConfig,
};
use teamsem_core::derivation::{entail as run_entail, AtomFact, EntailConfig, Entailment};
use teamsem_core::formula::{parse, parse_lines, parse_with_warnings};
use teamsem_core::io::{read_team, write_prob_csv, write_team_csv, TeamFile, TeamJson};
use teamsem_core::nogo;
use teamsem_core::rational::{fmt_q, to_f64, Q};
use teamsem_core::{
    check, check_prob, eval_possibilistic, eval_probabilistic, EvalContext, ProbTeam, Property,
    RoleSplit, Team, Value, Verdict,
};
use teamsem_quantum::{game_to_team, quantum_team, GameSpec};

use crate::report::Report;
use crate::{
    EntailArgs, EntropyArgs, EvalArgs, GameArgs, LiftArgs, NogoArgs, NogoCase, ProbeArgs,
    PropertyArgs,
};
use crate::{QuantumArgs, RealizeArgs, RealizeMode};

fn load(path: &Path) -> Result<TeamFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_team(&text).with_context(|| format!("in {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn team_json(f: &TeamFile) -> Json {
    serde_json::to_value(TeamJson::from_file(f)).expect("plain data")
}

/// Emits a team: to `out` if given (and says so), else as the text body.
fn emit_team(r: &mut Report, f: &TeamFile, out: Option<&Path>) -> Result<()> {
    let csv = match f {
        TeamFile::Plain(t) => write_team_csv(t),
        TeamFile::Prob(p) => write_prob_csv(p),
    };
    let rows = match f {
        TeamFile::Plain(t) => t.len(),
        TeamFile::Prob(p) => p.entries().count(),
    };
    match out {
        Some(p) => {
            write(p, &csv)?;
            r.line(format!("wrote {rows} rows to {}", p.display()));
        }
        None => r.text.push_str(&csv),
    }
    r.set("rows", rows);
    r.set("team", team_json(f));
    Ok(())
}

fn row_str(row: &[Value]) -> String {
    row.iter()
        .map(Value::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn eval(a: EvalArgs) -> Result<Report> {
    let file = load(&a.input.team)?;
    let src = match (&a.formula, &a.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => read_text(p)?,
        (None, None) => bail!("no formula given"),
    };
    let (phi, warnings) = parse_with_warnings(src.trim()).map_err(|e| anyhow!("formula: {e}"))?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let mut r = Report::new("eval");
    r.set("formula", phi.to_string());
    r.set("warnings", warnings.clone());
    let ctx = EvalContext::default()
        .with_k_max(a.k_max)
        .with_budget(a.budget);
    if a.input.prob || matches!(file, TeamFile::Prob(_)) {
        let pt = file.prob()?;
        let v = eval_probabilistic(&pt, &phi, &ctx)?;
        r.set("semantics", "probabilistic");
        r.set("verdict", Verdict::from_bool(v).to_string());
        r.line(Verdict::from_bool(v).to_string());
    } else {
        let v = eval_possibilistic(&file.team(), &phi, &ctx)?;
        r.set("semantics", "possibilistic");
        r.set("verdict", v.to_string());
        r.set("k_max", a.k_max);
        r.line(v.to_string());
        if v == Verdict::Inconclusive {
            r.inconclusive();
        }
    }
    Ok(r)
}

pub fn property(a: PropertyArgs) -> Result<Report> {
    let file = load(&a.input.team)?;
    let props: Vec<Property> = if a.check.is_empty() {
        Property::ALL.to_vec()
    } else {
        a.check
            .iter()
            .map(|s| s.trim().parse())
            .collect::<Result<_, _>>()?
    };
    let prob = a.input.prob || matches!(file, TeamFile::Prob(_));
    let mut r = Report::new("property");
    r.set(
        "semantics",
        if prob {
            "probabilistic"
        } else {
            "possibilistic"
        },
    );
    let (team, pt) = (file.team(), if prob { Some(file.prob()?) } else { None });
    let mut results = Map::new();
    for p in props {
        let res = match &pt {
            Some(pt) => check_prob(p, pt),
            None => check(p, &team),
        };
        match res {
            Ok(b) => {
                r.line(format!("{p}: {b}"));
                results.insert(p.to_string(), b.into());
            }
            Err(e) => {
                r.line(format!("{p}: n/a ({e})"));
                results.insert(p.to_string(), Json::Null);
            }
        }
    }
    r.set("properties", results);
    Ok(r)
}

pub fn realize(a: RealizeArgs) -> Result<Report> {
    let x = load(&a.team)?.team();
    let t = match a.mode {
        RealizeMode::Sv => extend_single_valued(&x, a.hidden)?,
        RealizeMode::Sd => realize_strong_determinism(&x)?,
        RealizeMode::Wdzi => realize_weak_det_z_indep(&x, a.cap)?,
        RealizeMode::Canon => canonicalize_local_to_sd(&x, a.cap)?,
    };
    let mut r = Report::new("realize");
    emit_team(&mut r, &TeamFile::Plain(t), a.out.as_deref())?;
    Ok(r)
}

pub fn lift(a: LiftArgs) -> Result<Report> {
    let x = load(&a.team)?.team();
    let pt = probabilistic_lift(&x)?;
    let mut r = Report::new("lift");
    emit_team(&mut r, &TeamFile::Prob(pt), a.out.as_deref())?;
    Ok(r)
}

struct Entropies {
    theta: f64,
    sections: Vec<(Vec<Value>, Vec<Value>, f64)>,
}

fn entropies(pt: &ProbTeam, keys: &[(Vec<Value>, Vec<Value>)]) -> Result<Entropies> {
    let theta = measurement_prior(pt)?.entropy();
    let mut sections = Vec::new();
    for (a, g) in keys {
        let eta = outcome_conditional(pt, a, g)?;
        sections.push((a.clone(), g.clone(), entropy(eta.values())));
    }
    Ok(Entropies { theta, sections })
}

pub fn entropy_report(a: EntropyArgs) -> Result<Report> {
    let file = load(&a.team)?;
    let x = file.team();
    let roles = RoleSplit::from_vars(x.vars())?;
    let lifted = probabilistic_lift(&x)?;
    let keys: Vec<(Vec<Value>, Vec<Value>)> = lift_counts(&x)?
        .m_o
        .keys()
        .map(|k| (k[..roles.x.len()].to_vec(), k[roles.x.len()..].to_vec()))
        .collect();
    let lift_h = entropies(&lifted, &keys)?;
    let given = match &file {
        TeamFile::Prob(p) => Some(entropies(p, &keys)?),
        TeamFile::Plain(_) => None,
    };
    let mut r = Report::new("entropy-report");
    r.line(format!("H(lift) = {:.9}", team_entropy(&lifted)));
    r.line(format!("H(theta) lift = {:.9}", lift_h.theta));
    if let Some(g) = &given {
        r.line(format!("H(theta) given = {:.9}", g.theta));
    }
    let mut secs = Vec::new();
    let mut dominated = given
        .as_ref()
        .is_none_or(|g| g.theta <= lift_h.theta + 1e-12);
    for (i, (a_, g_, h)) in lift_h.sections.iter().enumerate() {
        let mut line = format!("H(eta | x={} z={}) lift = {h:.9}", row_str(a_), row_str(g_));
        let mut s = json!({ "x": row_str(a_), "z": row_str(g_), "lift": h });
        if let Some(g) = &given {
            let hg = g.sections[i].2;
            line.push_str(&format!(", given = {hg:.9}"));
            s["given"] = hg.into();
            dominated &= hg <= h + 1e-12;
        }
        r.line(line);
        secs.push(s);
    }
    r.set("team_entropy", team_entropy(&lifted));
    r.set("theta_lift", lift_h.theta);
    if let Some(g) = &given {
        r.set("theta_given", g.theta);
        r.set("lift_dominates", dominated);
        r.line(format!("lift dominates: {dominated}"));
    }
    r.set("sections", secs);
    Ok(r)
}

pub fn pr_probe(a: ProbeArgs) -> Result<Report> {
    let x = load(&a.team)?.team();
    let props: Vec<Property> = a
        .props
        .iter()
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()?;
    let cfg = ProbeConfig {
        restarts: a.restarts,
        seed: a.seed,
        iterations: a.iterations,
        tolerance: a.tolerance,
    };
    let res = search_probabilistic_realization(&x, &props, &cfg)?;
    let mut r = Report::new("pr-probe");
    let names: Vec<String> = props.iter().map(|p| p.to_string()).collect();
    r.set("properties", names);
    r.set("restarts", res.restarts);
    r.set("seed", a.seed);
    r.set(
        "residual",
        if res.residual.is_finite() {
            json!(res.residual)
        } else {
            Json::Null
        },
    );
    match res.witness {
        Some(w) => {
            if res.restarts == 0 {
                r.line(format!(
                    "witness found without restarts (exact: {})",
                    res.exact
                ));
            } else {
                r.line(format!(
                    "witness found after {} restarts (exact: {})",
                    res.restarts, res.exact
                ));
            }
            r.set("exact", res.exact);
            r.set("witness", team_json(&TeamFile::Prob(w.clone())));
            if let Some(p) = &a.emit {
                write(p, &write_prob_csv(&w))?;
                r.line(format!("wrote witness to {}", p.display()));
            } else {
                r.text.push_str(&write_prob_csv(&w));
            }
        }
        None => {
            r.line(format!(
                "no witness in {} restarts; smallest residual {:.6e}",
                res.restarts, res.residual
            ));
            r.set("witness", Json::Null);
            r.inconclusive();
        }
    }
    Ok(r)
}

pub fn entail(a: EntailArgs) -> Result<Report> {
    let mut premises = Vec::new();
    if let Some(p) = &a.premises {
        let text = read_text(p)?;
        let fs = parse_lines(&text).map_err(|(line, e)| anyhow!("{}:{line}: {e}", p.display()))?;
        for f in fs {
            premises.extend(
                AtomFact::from_conjunction(&f)
                    .ok_or_else(|| anyhow!("premise `{f}` is not a conjunction of atoms"))?,
            );
        }
    }
    let g = parse(&a.goal).map_err(|e| anyhow!("goal: {e}"))?;
    let goal = AtomFact::from_formula(&g)
        .ok_or_else(|| anyhow!("goal `{g}` is not an independence atom"))?;
    let cfg = EntailConfig {
        depth: a.depth,
        side_len: a.side_len,
        max_facts: a.max_facts,
    };
    let mut r = Report::new("entail");
    r.set("goal", goal.to_string());
    r.set(
        "premises",
        premises.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    );
    match run_entail(&premises, &goal, &cfg)? {
        Entailment::Derived(d) => {
            r.text.push_str(&d.to_string());
            if !r.text.ends_with('\n') {
                r.text.push('\n');
            }
            r.set("derived", true);
            r.set(
                "steps",
                d.steps
                    .iter()
                    .map(|s| json!({ "rule": s.rule.to_string(), "inputs": s.inputs.iter().map(|i| i + 1).collect::<Vec<_>>(), "fact": s.fact.to_string() }))
                    .collect::<Vec<_>>(),
            );
        }
        Entailment::Exhausted { levels, facts } => {
            r.line(format!(
                "not derived within {levels} levels ({facts} facts)"
            ));
            r.set("derived", false);
            r.set("levels", levels);
            r.set("facts", facts);
            r.inconclusive();
        }
    }
    Ok(r)
}

fn model_report(r: &mut Report, x: &Team) -> Result<()> {
    let rep = nogo::verify_no_local_model(x, nogo::DEFAULT_INSTRUCTION_CAP)?;
    r.line(format!("instructions searched: {}", rep.searched));
    r.line(format!("consistent instructions: {}", rep.consistent.len()));
    for i in &rep.consistent {
        r.line(format!("  {i}"));
    }
    if !rep.uncovered.is_empty() {
        r.line("rows no consistent instruction produces:");
        for row in &rep.uncovered {
            r.line(format!("  {}", row_str(row)));
        }
    }
    r.line(format!("no local model: {}", rep.no_model()));
    r.set("searched", rep.searched.to_string());
    r.set(
        "consistent",
        rep.consistent
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>(),
    );
    r.set(
        "uncovered",
        rep.uncovered
            .iter()
            .map(|row| row_str(row))
            .collect::<Vec<_>>(),
    );
    r.set("no_local_model", rep.no_model());
    Ok(())
}

pub fn nogo(a: NogoArgs) -> Result<Report> {
    let mut r = Report::new("nogo");
    let team = match a.case {
        NogoCase::Epr => {
            let x = nogo::epr_team();
            let direct = nogo::verify_epr(&x)?;
            let by_formula = nogo::verify_epr_by_formula(&x)?;
            let phi = nogo::epr_formula(2)?;
            r.line("case: epr");
            r.line(format!(
                "no single-valued hidden variable with outcome independence: {direct}"
            ));
            r.line(format!("{phi} at k_max = 1: {by_formula}"));
            r.set("case", "epr");
            r.set("no_realization", direct);
            r.set("formula", phi.to_string());
            r.set("verdict", by_formula.to_string());
            x
        }
        NogoCase::Ghz => {
            let x = nogo::ghz_team_minimal();
            r.line("case: ghz");
            r.line(format!("is a GHZ team: {}", nogo::is_ghz_team(&x)?));
            model_report(&mut r, &x)?;
            let par = nogo::ghz_parity_certificate();
            r.line(format!("parity certificate: {par}"));
            r.set("case", "ghz");
            r.set("parity_certificate", par);
            x
        }
        NogoCase::Hardy => {
            let x = nogo::hardy_team_minimal();
            r.line("case: hardy");
            r.line(format!("is a Hardy team: {}", nogo::is_hardy_team(&x)?));
            model_report(&mut r, &x)?;
            r.set("case", "hardy");
            x
        }
        NogoCase::Ks => {
            let spec = nogo::KsSpec::standard();
            let x = nogo::ks_team_canonical();
            let none = nogo::verify_no_noncontextual(&spec);
            let assignments = (spec.q.len() as u64).pow(spec.p.len() as u32);
            r.line("case: ks");
            r.line(format!(
                "tuples: {}, every element in exactly two: {}",
                spec.p.len(),
                spec.double_cover()
            ));
            r.line(format!("assignments searched: {assignments}"));
            r.line(format!("no noncontextual assignment: {none}"));
            r.line(format!("parity obstruction: {}", spec.parity_obstruction()));
            r.line(format!(
                "canonical team: {} rows, KS team: {}",
                x.len(),
                nogo::is_ks_team(&x, &spec)?.is_some()
            ));
            r.set("case", "ks");
            r.set("assignments", assignments);
            r.set("no_noncontextual", none);
            r.set("parity_obstruction", spec.parity_obstruction());
            x
        }
    };
    if let Some(p) = &a.emit {
        write(p, &write_team_csv(&team))?;
        r.line(format!("wrote {} rows to {}", team.len(), p.display()));
    }
    r.set("rows", team.len());
    Ok(r)
}

pub fn quantum(a: QuantumArgs) -> Result<Report> {
    let sys = a.preset.system();
    let pt = quantum_team(&sys)?;
    let m = Q::from_integer((sys.measurements.len() as i64).into());
    let mut r = Report::new("quantum");
    let mut table = Vec::new();
    for x in &sys.measurements {
        let xs: String = x.iter().map(|v| v.to_string()).collect();
        let mut cells = Vec::new();
        let mut probs = Map::new();
        for b in &sys.outcomes {
            let row: Vec<Value> = x.iter().chain(b).map(|&v| Value::Int(v)).collect();
            let p = pt.weight(&row) * &m;
            let bs: String = b.iter().map(|v| v.to_string()).collect();
            cells.push(format!("{bs}:{}", fmt_q(&p)));
            probs.insert(bs, fmt_q(&p).into());
        }
        r.line(format!("x={xs}  {}", cells.join("  ")));
        table.push(json!({ "x": xs, "p": probs }));
    }
    let c = pt.collapse();
    r.line(format!("collapse: {} rows", c.len()));
    r.set("table", table);
    r.set("collapse_rows", c.len());
    r.set(
        "total",
        fmt_q(&pt.entries().map(|(_, w)| w.clone()).sum::<Q>()),
    );
    r.set(
        "min_nonzero",
        pt.support()
            .map(|(_, w)| to_f64(w))
            .fold(f64::INFINITY, f64::min),
    );
    if let Some(p) = &a.emit {
        write(p, &write_prob_csv(&pt))?;
        r.line(format!(
            "wrote {} rows to {}",
            pt.entries().count(),
            p.display()
        ));
    }
    Ok(r)
}

pub fn game(a: GameArgs) -> Result<Report> {
    let g = match &a.spec {
        Some(p) => {
            let spec: GameSpec = serde_json::from_str(&read_text(p)?)
                .with_context(|| format!("in {}", p.display()))?;
            spec.into_game()
                .map_err(|e| anyhow!("{}: {e}", p.display()))?
        }
        None => teamsem_quantum::chsh(),
    };
    let t = game_to_team(&g);
    let mut r = Report::new("game");
    r.line(format!("winning team: {} rows", t.len()));
    if t.is_empty() {
        r.line("some question pair has no winning answer");
    }
    r.set("rows", t.len());
    r.set("team", team_json(&TeamFile::Plain(t.clone())));
    if let Some(p) = &a.to_team {
        write(p, &write_team_csv(&t))?;
        r.line(format!("wrote {} rows to {}", t.len(), p.display()));
    }
    Ok(r)
}
