//! Fixtures shared by the benchmarks: the corpus documents, and a family of
//! chain models whose size can be scaled.

use std::sync::Arc;

use causex_core::dsl::{parse_context, parse_formula, parse_model, parse_state, Pos};
use causex_core::{BoolFormula, CausalModel, Conjunction, EpistemicState, PrimitiveEvent, Setting};

pub const FOREST: &str = include_str!("../../../corpus/forest.scm.txt");
pub const MATH: &str = include_str!("../../../corpus/math.scm.txt");
pub const MATH_STATES: &str = include_str!("../../../corpus/math.state.txt");
pub const ROCK: &str = include_str!("../../../corpus/rock.scm.txt");

const START: Pos = Pos { line: 1, column: 1 };

pub fn models(text: &str) -> Vec<Arc<CausalModel>> {
    parse_model(text).expect("fixture model").into_iter().map(Arc::new).collect()
}

pub fn setting(text: &str, id: &str, context: &str) -> Setting {
    let m = models(text).into_iter().find(|m| m.id() == id).expect("fixture model id");
    Setting::new(m, parse_context(context, START).unwrap()).unwrap()
}

pub fn phi(m: &CausalModel, text: &str) -> BoolFormula {
    parse_formula(text, m.signature()).unwrap().body
}

pub fn conjunction(events: &[(&str, i64)]) -> Conjunction {
    Conjunction::new(events.iter().map(|&(v, x)| PrimitiveEvent::new(v, x)).collect()).unwrap()
}

/// The uniform state over K'.
pub fn kprime() -> EpistemicState {
    parse_state(MATH_STATES, &models(MATH)).unwrap().into_iter().find(|(n, _)| n == "Kprime-uniform").unwrap().1
}

/// `n` binary endogenous variables `X0..`, each the `or` of the previous
/// two, fed by two exogenous variables.
pub fn chain_text(n: usize) -> String {
    let mut s = String::from("model Chain {\n  exo U0 : {0, 1}\n  exo U1 : {0, 1}\n");
    for i in 0..n {
        let body = match i {
            0 => "U0".to_string(),
            1 => "U1".to_string(),
            _ => format!("X{} or X{}", i - 2, i - 1),
        };
        s.push_str(&format!("  endo X{i} : {{0, 1}} = {body}\n"));
    }
    s.push_str("}\n");
    s
}

pub fn chain(n: usize) -> Setting {
    setting(&chain_text(n), "Chain", "U0=1, U1=1")
}
