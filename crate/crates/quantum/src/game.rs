use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use teamsem_core::{Team, Value};

/// A two-player one-round game: V(a, b | c, d) for answers a, b to
/// questions c, d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonLocalGame {
    pub i_a: Vec<i64>,
    pub i_b: Vec<i64>,
    pub o_a: Vec<i64>,
    pub o_b: Vec<i64>,
    /// Keyed (a, b, c, d).
    pub v: BTreeMap<(i64, i64, i64, i64), bool>,
}

impl NonLocalGame {
    pub fn from_predicate(
        i_a: Vec<i64>,
        i_b: Vec<i64>,
        o_a: Vec<i64>,
        o_b: Vec<i64>,
        pred: impl Fn(i64, i64, i64, i64) -> bool,
    ) -> NonLocalGame {
        let mut v = BTreeMap::new();
        for &a in &o_a {
            for &b in &o_b {
                for &c in &i_a {
                    for &d in &i_b {
                        v.insert((a, b, c, d), pred(a, b, c, d));
                    }
                }
            }
        }
        NonLocalGame {
            i_a,
            i_b,
            o_a,
            o_b,
            v,
        }
    }

    pub fn wins(&self, a: i64, b: i64, c: i64, d: i64) -> bool {
        self.v.get(&(a, b, c, d)).copied().unwrap_or(false)
    }
}

/// The winning condition a ⊕ b = c ∧ d over bits.
pub fn chsh() -> NonLocalGame {
    let bits = vec![0, 1];
    NonLocalGame::from_predicate(
        bits.clone(),
        bits.clone(),
        bits.clone(),
        bits,
        |a, b, c, d| (a ^ b) == (c & d),
    )
}

/// All (x0, x1, y0, y1) = (c, d, a, b) with V(a, b | c, d) = 1; the empty
/// team if some question pair has no winning answers.
pub fn game_to_team(g: &NonLocalGame) -> Team {
    let mut rows = Vec::new();
    for &c in &g.i_a {
        for &d in &g.i_b {
            let before = rows.len();
            for &a in &g.o_a {
                for &b in &g.o_b {
                    if g.wins(a, b, c, d) {
                        rows.push([c, d, a, b].map(Value::Int).to_vec());
                    }
                }
            }
            if rows.len() == before {
                return Team::new(teamsem_core::value::vars(&["x0", "x1", "y0", "y1"]))
                    .expect("distinct names");
            }
        }
    }
    Team::from_rows(teamsem_core::value::vars(&["x0", "x1", "y0", "y1"]), rows)
        .expect("fixed arity")
}

/// JSON form: question and answer sets and the full truth table of V as
/// `[a, b, c, d, value]` entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    #[serde(rename = "I_A")]
    pub i_a: Vec<i64>,
    #[serde(rename = "I_B")]
    pub i_b: Vec<i64>,
    #[serde(rename = "O_A")]
    pub o_a: Vec<i64>,
    #[serde(rename = "O_B")]
    pub o_b: Vec<i64>,
    #[serde(rename = "V")]
    pub v: Vec<[i64; 5]>,
}

impl GameSpec {
    /// Fails unless V is given exactly once on every (a, b, c, d).
    pub fn into_game(self) -> Result<NonLocalGame, String> {
        let mut v = BTreeMap::new();
        for [a, b, c, d, val] in self.v {
            if !(self.o_a.contains(&a)
                && self.o_b.contains(&b)
                && self.i_a.contains(&c)
                && self.i_b.contains(&d))
            {
                return Err(format!(
                    "V entry ({a},{b}|{c},{d}) is outside the declared sets"
                ));
            }
            if !matches!(val, 0 | 1) {
                return Err(format!("V({a},{b}|{c},{d}) = {val} is not 0 or 1"));
            }
            if v.insert((a, b, c, d), val == 1).is_some() {
                return Err(format!("V({a},{b}|{c},{d}) given twice"));
            }
        }
        let want = self.o_a.len() * self.o_b.len() * self.i_a.len() * self.i_b.len();
        if v.len() != want {
            return Err(format!("V has {} entries, expected {want}", v.len()));
        }
        Ok(NonLocalGame {
            i_a: self.i_a,
            i_b: self.i_b,
            o_a: self.o_a,
            o_b: self.o_b,
            v,
        })
    }

    pub fn from_game(g: &NonLocalGame) -> GameSpec {
        GameSpec {
            i_a: g.i_a.clone(),
            i_b: g.i_b.clone(),
            o_a: g.o_a.clone(),
            o_b: g.o_b.clone(),
            v: g.v
                .iter()
                .map(|(&(a, b, c, d), &w)| [a, b, c, d, w as i64])
                .collect(),
        }
    }
}
