use std::collections::{HashMap, VecDeque};

use super::poly::Monomial;
use super::system::ReductionSystem;

/// Aho–Corasick automaton over rule left sides; `dead` states have just read one.
struct Automaton {
    next: Vec<Vec<usize>>,
    dead: Vec<bool>,
}

impl Automaton {
    fn build(sys: &ReductionSystem) -> Automaton {
        let n = sys.n_letters() as usize;
        let mut children: Vec<HashMap<u32, usize>> = vec![HashMap::new()];
        let mut dead = vec![false];
        for r in sys.rules() {
            let mut s = 0;
            for &g in r.lhs.letters() {
                s = match children[s].get(&g) {
                    Some(&t) => t,
                    None => {
                        children.push(HashMap::new());
                        dead.push(false);
                        let t = children.len() - 1;
                        children[s].insert(g, t);
                        t
                    }
                };
            }
            dead[s] = true;
        }
        let mut next = vec![vec![0usize; n]; children.len()];
        let mut fail = vec![0usize; children.len()];
        let mut queue = VecDeque::new();
        for g in 0..n {
            if let Some(&t) = children[0].get(&(g as u32)) {
                next[0][g] = t;
                queue.push_back(t);
            }
        }
        while let Some(s) = queue.pop_front() {
            dead[s] = dead[s] || dead[fail[s]];
            for g in 0..n {
                match children[s].get(&(g as u32)) {
                    Some(&t) => {
                        fail[t] = next[fail[s]][g];
                        next[s][g] = t;
                        queue.push_back(t);
                    }
                    None => next[s][g] = next[fail[s]][g],
                }
            }
        }
        Automaton { next, dead }
    }
}

/// Number of irreducible words of each length `0..=max_degree`.
pub fn irreducible_counts(sys: &ReductionSystem, max_degree: usize) -> Vec<u128> {
    let auto = Automaton::build(sys);
    if auto.dead[0] {
        return vec![0; max_degree + 1];
    }
    let mut counts = vec![0u128; auto.next.len()];
    counts[0] = 1;
    let mut out = vec![1u128];
    for _ in 0..max_degree {
        let mut nxt = vec![0u128; counts.len()];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &t in &auto.next[s] {
                if !auto.dead[t] {
                    nxt[t] += c;
                }
            }
        }
        counts = nxt;
        out.push(counts.iter().sum());
    }
    out
}

/// Explicit list of irreducible words of length exactly `degree`.
pub fn irreducible_words(sys: &ReductionSystem, degree: usize) -> Vec<Monomial> {
    let auto = Automaton::build(sys);
    if auto.dead[0] {
        return Vec::new();
    }
    let mut frontier = vec![(Vec::new(), 0usize)];
    for _ in 0..degree {
        let mut grown = Vec::new();
        for (w, s) in &frontier {
            for (g, &t) in auto.next[*s].iter().enumerate() {
                if !auto.dead[t] {
                    let mut v: Vec<u32> = w.clone();
                    v.push(g as u32);
                    grown.push((v, t));
                }
            }
        }
        frontier = grown;
    }
    frontier.into_iter().map(|(w, _)| Monomial(w)).collect()
}
