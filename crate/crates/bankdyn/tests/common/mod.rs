//! Deterministic random inputs shared by the integration suites.
//!
//! Everything draws from the crate's own generator, so the suites
//! reproduce bit for bit across machines and runs.
#![allow(dead_code)] // each test target uses its own subset

use bankdyn::{InteractionConfig, SideParams, SplitMix64, StateGraph, Transition};

/// Uniform draw in [lo, hi).
pub fn draw(rng: &mut SplitMix64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.next_unit()
}

/// Integer draw in [lo, hi] inclusive.
pub fn draw_index(rng: &mut SplitMix64, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

/// A valid closed graph (no source) with 2..=max_states states. Every
/// state sits on a ring, so the graph is irreducible and has a unique
/// steady state.
pub fn random_closed_graph(rng: &mut SplitMix64, max_states: usize) -> StateGraph {
    let n = draw_index(rng, 2, max_states);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let initial: Vec<f64> = (0..n).map(|_| draw(rng, 0.0, 20.0)).collect();
    let mut transitions: Vec<Transition> = (0..n)
        .map(|i| Transition {
            from: i,
            to: (i + 1) % n,
            rate: draw(rng, 0.05, 1.0),
        })
        .collect();
    for from in 0..n {
        for to in 0..n {
            let on_ring = to == (from + 1) % n;
            if from != to && !on_ring && rng.next_unit() < 0.3 {
                transitions.push(Transition {
                    from,
                    to,
                    rate: draw(rng, 0.05, 1.0),
                });
            }
        }
    }
    let graph = StateGraph::new(states, initial, transitions, 0.0);
    assert!(graph.validate().is_ok(), "generator produced an invalid graph");
    graph
}

/// Like `random_closed_graph`, but with integer initial levels so the
/// stochastic sampler accepts the graph.
pub fn random_counting_graph(rng: &mut SplitMix64, max_states: usize) -> StateGraph {
    let mut graph = random_closed_graph(rng, max_states);
    for level in &mut graph.initial_levels {
        *level = level.round();
    }
    graph
}

/// A gentle interaction config. Each side loses at most
/// p·lambda·partner_pool per unit time, so with these ranges a pool
/// drops by no more than 7.2 over [0, 3] from at least 10: both pools
/// stay safely positive on the horizons the suites use.
pub fn random_interaction_config(rng: &mut SplitMix64) -> InteractionConfig {
    let side = |rng: &mut SplitMix64| SideParams {
        success_probability: draw(rng, 0.1, 0.4),
        productivity: draw(rng, 0.05, 0.2),
        operation_time: draw(rng, 0.05, 0.5),
        attention_delay: draw(rng, 0.05, 0.5),
        initial_pool: draw(rng, 10.0, 30.0),
    };
    InteractionConfig {
        bank: side(rng),
        client: side(rng),
    }
}

fn random_identifier(rng: &mut SplitMix64, index: usize) -> String {
    const TAILS: &[&str] = &["", "_x", ".hold", "-tier1", "_2.b", "-q_0"];
    let head = match draw_index(rng, 0, 2) {
        0 => "st",
        1 => "_n",
        _ => "Node",
    };
    format!("{head}{index}{}", TAILS[draw_index(rng, 0, TAILS.len() - 1)])
}

fn spaces(rng: &mut SplitMix64) -> &'static str {
    match draw_index(rng, 0, 3) {
        0 => " ",
        1 => "  ",
        2 => "\t",
        _ => " \t ",
    }
}

fn random_level(rng: &mut SplitMix64) -> String {
    match draw_index(rng, 0, 3) {
        0 => format!("{}", draw_index(rng, 0, 500)),
        1 => format!("{}", draw(rng, 0.0, 100.0)),
        2 => format!("{:e}", draw(rng, 1e-3, 1e3)),
        _ => format!("{:.4}", draw(rng, 0.0, 50.0)),
    }
}

/// A random valid model document with noisy formatting: tabs, comments,
/// blank lines, varied number spellings, and the header at a random
/// position. Parsing it must succeed.
pub fn random_document(rng: &mut SplitMix64) -> String {
    let n = draw_index(rng, 1, 8);
    let names: Vec<String> = (0..n).map(|i| random_identifier(rng, i)).collect();

    let mut lines: Vec<String> = Vec::new();
    for name in &names {
        let s0 = spaces(rng);
        let s1 = spaces(rng);
        let s2 = spaces(rng);
        lines.push(format!("state{s0}{name}{s1}init{s2}{}", random_level(rng)));
    }
    for from in 0..n {
        for to in 0..n {
            if from != to && rng.next_unit() < 0.4 {
                let s0 = spaces(rng);
                let s1 = spaces(rng);
                lines.push(format!(
                    "transition{s0}{}{s1}{} rate {}",
                    names[from],
                    names[to],
                    random_level(rng)
                ));
            }
        }
    }
    if rng.next_unit() < 0.5 {
        lines.push(format!("source {} rate {}", names[0], random_level(rng)));
    }

    let header_at = draw_index(rng, 0, lines.len());
    lines.insert(header_at, format!("model network{}", draw_index(rng, 0, 99)));

    let mut text = String::new();
    for line in lines {
        if rng.next_unit() < 0.2 {
            text.push_str("# a comment line\n");
        }
        if rng.next_unit() < 0.15 {
            text.push('\n');
        }
        text.push_str(&line);
        if rng.next_unit() < 0.2 {
            text.push_str("   # trailing note");
        }
        text.push('\n');
    }
    text
}
