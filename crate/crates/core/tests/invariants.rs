use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use teamsem_core::constructions::{
    canonicalize_local_to_sd, empirically_equivalent, extend_single_valued, probabilistic_lift,
    realize_strong_determinism, realize_weak_det_z_indep, DEFAULT_CAP,
};
use teamsem_core::derivation::{entail, AtomFact, EntailConfig, Entailment};
use teamsem_core::io::{read_team, write_team_file, TeamFile};
use teamsem_core::random::{random_empirical_team, random_local_team, random_zi_team};
use teamsem_core::rational::q;
use teamsem_core::value::vars;
use teamsem_core::{
    check, check_prob, eval_possibilistic, eval_probabilistic, parse, realizes, EvalContext,
    Formula, ProbTeam, Property, Row, Team, Value, Q,
};

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn team_of(names: &[&str], rows: Vec<Vec<i64>>) -> Team {
    Team::from_rows(
        vars(names),
        rows.into_iter()
            .map(|r| r.into_iter().map(Value::Int).collect::<Row>()),
    )
    .unwrap()
}

fn small_team(
    names: &'static [&'static str],
    dom: i64,
    max_rows: usize,
) -> impl Strategy<Value = Team> {
    prop::collection::vec(prop::collection::vec(0..dom, names.len()), 0..=max_rows)
        .prop_map(move |rows| team_of(names, rows))
}

fn prob_team(
    names: &'static [&'static str],
    dom: i64,
    max_rows: usize,
) -> impl Strategy<Value = ProbTeam> {
    prop::collection::vec(
        (prop::collection::vec(0..dom, names.len()), 1..=6i64),
        1..=max_rows,
    )
    .prop_map(move |rows| {
        let pairs = rows.into_iter().map(|(r, w)| {
            (
                r.into_iter().map(Value::Int).collect::<Row>(),
                Q::from_integer(w.into()),
            )
        });
        ProbTeam::normalized(vars(names), pairs).unwrap()
    })
}

fn tuple() -> impl Strategy<Value = Vec<String>> {
    prop::sample::subsequence(NAMES.to_vec(), 0..=3)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(NAMES.to_vec()).prop_map(String::from)
}

/// Quantifier-free formulas built from dependence atoms and (in)equalities.
fn flat_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (tuple(), tuple()).prop_map(|(x, y)| Formula::Dep { x, y }),
        tuple().prop_map(Formula::Const),
        (name(), name()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (name(), name()).prop_map(|(a, b)| Formula::Neq(a, b)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2).prop_map(Formula::And),
            prop::collection::vec(inner, 2).prop_map(Formula::Or),
        ]
    })
}

/// Adds independence atoms, which disjunctions never contain.
fn qf_formula() -> impl Strategy<Value = Formula> {
    let indep = (tuple(), tuple(), tuple()).prop_map(|(y, x, z)| Formula::Indep { y, x, z });
    let leaf = prop_oneof![flat_formula(), indep];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop::collection::vec(inner, 2).prop_map(Formula::And)
    })
}

fn holds(t: &Team, phi: &Formula) -> bool {
    eval_possibilistic(t, phi, &EvalContext::default())
        .unwrap()
        .is_true()
}

fn prob_holds(pt: &ProbTeam, phi: &Formula) -> bool {
    eval_probabilistic(pt, phi, &EvalContext::default()).unwrap()
}

fn atom() -> impl Strategy<Value = AtomFact> {
    (tuple(), tuple(), tuple()).prop_map(|(y, x, z)| AtomFact::from_parts(y, x, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dependence_formulas_are_downward_closed(t in small_team(&NAMES, 3, 8), mask in any::<u16>(), phi in flat_formula()) {
        let rows: Vec<Row> = t.rows().cloned().collect();
        let sub = Team::from_rows(t.vars().to_vec(), rows.into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| r)).unwrap();
        if holds(&t, &phi) {
            prop_assert!(holds(&sub, &phi), "{phi}");
        }
    }

    #[test]
    fn empty_team_satisfies_everything(phi in qf_formula()) {
        prop_assert!(holds(&Team::new(vars(&NAMES)).unwrap(), &phi));
    }

    #[test]
    fn dependence_is_self_independence(t in small_team(&NAMES, 3, 8), x in tuple(), y in tuple()) {
        let dep = Formula::Dep { x: x.clone(), y: y.clone() };
        let ind = Formula::Indep { y: y.clone(), x, z: y };
        prop_assert_eq!(holds(&t, &dep), holds(&t, &ind));
    }

    #[test]
    fn collapse_preserves_satisfaction(pt in prob_team(&NAMES, 2, 6), phi in qf_formula()) {
        if prob_holds(&pt, &phi) {
            prop_assert!(holds(&pt.collapse(), &phi), "{phi}");
        }
    }

    #[test]
    fn flat_formulas_only_see_the_support(pt in prob_team(&NAMES, 2, 6), phi in flat_formula()) {
        prop_assert_eq!(prob_holds(&pt, &phi), holds(&pt.collapse(), &phi));
    }

    #[test]
    fn formulas_print_and_parse_back(phi in qf_formula()) {
        let printed = phi.to_string();
        let again = parse(&printed).unwrap();
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn csv_round_trip(t in small_team(&NAMES, 4, 10), pt in prob_team(&NAMES, 3, 8)) {
        for f in [TeamFile::Plain(t), TeamFile::Prob(pt)] {
            let text = write_team_file(&f);
            prop_assert_eq!(read_team(&text).unwrap(), f);
        }
    }

    #[test]
    fn property_implications_hold_possibilistically(t in small_team(&["x0", "x1", "y0", "y1", "z"], 2, 6)) {
        let c = |p| check(p, &t).unwrap();
        if c(Property::WD) { prop_assert!(c(Property::OI)); }
        if c(Property::SD) { prop_assert!(c(Property::PI)); }
        if c(Property::PI) && c(Property::WD) { prop_assert!(c(Property::SD)); }
        prop_assert_eq!(c(Property::Local), c(Property::PI) && c(Property::OI));
    }

    #[test]
    fn property_implications_hold_probabilistically(pt in prob_team(&["x0", "x1", "y0", "y1", "z"], 2, 6)) {
        let c = |p| check_prob(p, &pt).unwrap();
        if c(Property::WD) { prop_assert!(c(Property::OI)); }
        if c(Property::SD) { prop_assert!(c(Property::PI)); }
        if c(Property::PI) && c(Property::WD) { prop_assert!(c(Property::SD)); }
        for p in Property::ALL {
            if c(p) { prop_assert!(check(p, &pt.collapse()).unwrap(), "{p}"); }
        }
    }

    #[test]
    fn realizations_have_their_properties(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_empirical_team(&mut rng, n, 2, 5);
        let sv = extend_single_valued(&x, 2).unwrap();
        prop_assert!(realizes(&sv, &x).unwrap() && check(Property::SV, &sv).unwrap());
        let sd = realize_strong_determinism(&x).unwrap();
        prop_assert!(realizes(&sd, &x).unwrap() && check(Property::SD, &sd).unwrap());
        let wd = realize_weak_det_z_indep(&x, DEFAULT_CAP).unwrap();
        prop_assert!(realizes(&wd, &x).unwrap());
        prop_assert!(check(Property::WD, &wd).unwrap() && check(Property::ZI, &wd).unwrap());
    }

    #[test]
    fn local_teams_canonicalize_to_strong_determinism(seed in any::<u64>(), n in 1usize..=2, l in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random_local_team(&mut rng, n, l, 2);
        let c = canonicalize_local_to_sd(&y, DEFAULT_CAP).unwrap();
        prop_assert!(empirically_equivalent(&y, &c).unwrap());
        prop_assert!(check(Property::SD, &c).unwrap() && check(Property::ZI, &c).unwrap());
    }

    #[test]
    fn lift_is_an_exact_realization(seed in any::<u64>(), n in 1usize..=3, l in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_zi_team(&mut rng, n, l, 2);
        let pt = probabilistic_lift(&x).unwrap();
        prop_assert_eq!(pt.collapse(), x);
        prop_assert_eq!(pt.entries().map(|(_, w)| w.clone()).sum::<Q>(), q(1, 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivations_replay_and_grow_with_premises(premises in prop::collection::vec(atom(), 1..=3), extra in atom(), goal in atom()) {
        let cfg = EntailConfig { depth: 3, ..EntailConfig::default() };
        if let Entailment::Derived(d) = entail(&premises, &goal, &cfg).unwrap() {
            prop_assert!(d.replay(&premises).is_ok());
            prop_assert_eq!(d.conclusion(), &goal);
            let mut more = premises.clone();
            more.push(extra);
            let again = entail(&more, &goal, &cfg).unwrap();
            prop_assert!(again.derivation().is_some());
        }
    }

    #[test]
    fn derived_atoms_hold_where_premises_do(premises in prop::collection::vec(atom(), 1..=2), goal in atom(), t in small_team(&NAMES, 2, 5)) {
        let cfg = EntailConfig { depth: 3, ..EntailConfig::default() };
        if entail(&premises, &goal, &cfg).unwrap().derivation().is_some()
            && premises.iter().all(|p| holds(&t, &p.to_formula()))
        {
            prop_assert!(holds(&t, &goal.to_formula()), "{goal}");
        }
    }
}

/// Uniform settings make the settings mutually independent whatever the
/// outcome distributions are.
#[test]
fn uniform_settings_give_measurement_locality() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.gen_range(2..=3);
        let mut names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        names.extend((0..n).map(|i| format!("y{i}")));
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut pairs = Vec::new();
        for a in 0..(1 << n) {
            let weights: Vec<i64> = (0..(1 << n)).map(|_| rng.gen_range(0..=5)).collect();
            let total: i64 = weights.iter().sum::<i64>().max(1);
            for (b, &w) in weights.iter().enumerate() {
                let w = if weights.iter().all(|&v| v == 0) && b == 0 {
                    1
                } else {
                    w
                };
                let row: Row = (0..n)
                    .map(|i| Value::Int((a >> i) & 1))
                    .chain((0..n).map(|i| Value::Int((b as i64 >> i) & 1)))
                    .collect();
                pairs.push((row, q(w, total * (1 << n))));
            }
        }
        let pt = ProbTeam::normalized(vars(&names), pairs).unwrap();
        assert!(check_prob(Property::ML, &pt).unwrap());
    }
}

#[test]
fn locality_matches_the_formula_on_larger_teams() {
    use rand::Rng;
    use rayon::prelude::*;
    let bad: Vec<u64> = (0..100_000u64)
        .into_par_iter()
        .filter(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (n, l, dom) = (
                rng.gen_range(1..=3),
                rng.gen_range(1..=2),
                rng.gen_range(2..=3),
            );
            let t = teamsem_core::random::random_hidden_team(&mut rng, n, l, dom, 12);
            check(Property::Local, &t).unwrap()
                != (check(Property::PI, &t).unwrap() && check(Property::OI, &t).unwrap())
        })
        .collect();
    assert!(bad.is_empty(), "seeds {bad:?}");
}
