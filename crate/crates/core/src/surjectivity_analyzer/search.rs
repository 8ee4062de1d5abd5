use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::AnalyzeError;
use crate::word_algebra::{exponent_sum, t_shape, Alphabet, Letter, MixedWord, Sign, TShape};

/// Environment variable holding the worker count for the search; unset or
/// `1` means single-threaded.
pub const WORKERS_ENV: &str = "ONEREL_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub conj_len: usize,
    pub products: usize,
}

/// The factor `u w^sign u^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugateFactor {
    pub conjugator: MixedWord,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureWitness {
    pub element: MixedWord,
    pub factors: Vec<ConjugateFactor>,
}

fn push(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last().copied() == Some(l.inv()) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

fn product(a: &[Letter], b: &[Letter]) -> Vec<Letter> {
    let mut out = a.to_vec();
    for &l in b {
        push(&mut out, l);
    }
    out
}

fn stable_count(letters: &[Letter]) -> usize {
    letters.iter().filter(|l| l.is_stable()).count()
}

/// Reduced words of length at most `max_len`, ordered by length and then
/// letter order.
fn reduced_words(letters: &[Letter], max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in letters {
                if w.last().copied() != Some(l.inv()) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

struct Conjugate {
    conjugator: Vec<Letter>,
    sign: Sign,
    value: Vec<Letter>,
    stable: usize,
    exponent: i64,
}

#[derive(Default)]
struct Node {
    children: Vec<(Letter, usize)>,
    ending: Vec<usize>,
    /// Conjugates in this subtree, grouped by their number of stable letters.
    by_stable: BTreeMap<usize, Vec<usize>>,
}

/// Prefix tree over conjugate values, answering which conjugates `c` make
/// `p c` have a given number of stable letters.
struct Trie {
    nodes: Vec<Node>,
}

impl Trie {
    fn new<'a>(entries: impl Iterator<Item = (usize, &'a Conjugate)>) -> Self {
        let mut nodes = vec![Node::default()];
        for (id, c) in entries {
            let mut cur = 0;
            nodes[0].by_stable.entry(c.stable).or_default().push(id);
            for &l in &c.value {
                let next = match nodes[cur].children.iter().find(|(x, _)| *x == l) {
                    Some(&(_, n)) => n,
                    None => {
                        nodes.push(Node::default());
                        let n = nodes.len() - 1;
                        nodes[cur].children.push((l, n));
                        n
                    }
                };
                cur = next;
                nodes[cur].by_stable.entry(c.stable).or_default().push(id);
            }
            nodes[cur].ending.push(id);
        }
        Trie { nodes }
    }

    /// Conjugates `c` whose product `p c` has exactly `target` stable letters.
    fn query(&self, p: &[Letter], conjugates: &[Conjugate], target: usize, out: &mut Vec<usize>) {
        let m = p.len();
        let mut kept_stable = vec![0usize; m + 1];
        for i in 0..m {
            kept_stable[i + 1] = kept_stable[i] + usize::from(p[i].is_stable());
        }
        let total = kept_stable[m] as i64;
        let mut node = 0;
        let mut d = 0;
        loop {
            // Cancelling exactly d letters keeps p[..m-d] and c[d..]; the
            // cancelled prefix of c has total - kept stable letters.
            let kept = kept_stable[m - d] as i64;
            let need = target as i64 + total - 2 * kept;
            let next = (d < m).then(|| p[m - 1 - d].inv());
            if need >= 0 {
                let need = need as usize;
                let n = &self.nodes[node];
                out.extend(n.ending.iter().copied().filter(|&id| conjugates[id].stable == need));
                for &(l, child) in &n.children {
                    if Some(l) != next {
                        if let Some(ids) = self.nodes[child].by_stable.get(&need) {
                            out.extend(ids.iter().copied());
                        }
                    }
                }
            }
            let Some(l) = next else { break };
            match self.nodes[node].children.iter().find(|(x, _)| *x == l) {
                Some(&(_, child)) => {
                    node = child;
                    d += 1;
                }
                None => break,
            }
        }
    }
}

/// Canonical order of witnesses: factor count, total conjugator length,
/// then the factor indices (conjugates are indexed in shortlex order of
/// conjugator, then sign).
type Key = (usize, Vec<usize>);

struct Search<'a> {
    conjugates: Vec<Conjugate>,
    tries: BTreeMap<i64, Trie>,
    target: &'a TShape,
    target_stable: usize,
    target_sum: i64,
    step: i64,
}

impl Search<'_> {
    fn total_len(&self, ids: &[usize]) -> usize {
        ids.iter().map(|&i| self.conjugates[i].conjugator.len()).sum()
    }

    fn better(&self, a: &[usize], b: &Option<Key>) -> bool {
        match b {
            None => true,
            Some((len, ids)) => (self.total_len(a), a) < (*len, ids.as_slice()),
        }
    }

    /// Best witness extending `prefix` (value `value`, exponent `sum`) to
    /// exactly `k` factors.
    fn extend(&self, prefix: &mut Vec<usize>, value: &[Letter], sum: i64, k: usize, best: &mut Option<Key>) {
        let remaining = k - prefix.len();
        if (self.target_sum - sum).abs() > remaining as i64 * self.step {
            return;
        }
        if let Some((len, _)) = best {
            if self.total_len(prefix) > *len {
                return;
            }
        }
        if remaining == 1 {
            let Some(trie) = self.tries.get(&(self.target_sum - sum)) else { return };
            let mut hits = Vec::new();
            trie.query(value, &self.conjugates, self.target_stable, &mut hits);
            for id in hits {
                prefix.push(id);
                if self.better(prefix, best) {
                    let element = MixedWord::from_letters(product(value, &self.conjugates[id].value));
                    if t_shape(&element) == *self.target {
                        *best = Some((self.total_len(prefix), prefix.clone()));
                    }
                }
                prefix.pop();
            }
            return;
        }
        for (id, c) in self.conjugates.iter().enumerate() {
            prefix.push(id);
            let v = product(value, &c.value);
            self.extend(prefix, &v, sum + c.exponent, k, best);
            prefix.pop();
        }
    }

    fn level(&self, k: usize) -> Option<Key> {
        if k == 1 {
            let mut best = None;
            self.extend(&mut Vec::new(), &[], 0, 1, &mut best);
            return best;
        }
        let branch = |id: usize| {
            let mut best = None;
            let c = &self.conjugates[id];
            self.extend(&mut vec![id], &c.value, c.exponent, k, &mut best);
            best
        };
        let results: Vec<Option<Key>> = match workers() {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool");
                pool.install(|| (0..self.conjugates.len()).into_par_iter().map(branch).collect())
            }
            None => (0..self.conjugates.len()).map(branch).collect(),
        };
        results.into_iter().flatten().min()
    }
}

fn workers() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.parse().ok().filter(|&n: &usize| n > 1)
}

/// Searches products of at most `bounds.products` conjugates `u w^+-1 u^-1`
/// with `|u| <= bounds.conj_len` for an element of t-shape `target`, and
/// returns the least one in canonical order: fewest factors, then smallest
/// total conjugator length, then the factor list compared in shortlex order
/// of conjugators with `+1` before `-1`.
pub fn normal_closure_search(
    w: &MixedWord,
    alphabet: &Alphabet,
    target: &TShape,
    bounds: SearchBounds,
) -> Result<Option<ClosureWitness>, AnalyzeError> {
    if bounds.conj_len == 0 || bounds.products == 0 {
        return Err(AnalyzeError::ZeroBound);
    }
    super::check_alphabet(alphabet, w)?;
    let inverse = w.inverse();
    let mut conjugates: Vec<Conjugate> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for u in reduced_words(&alphabet.letters(), bounds.conj_len) {
        let u_inv: Vec<Letter> = u.iter().rev().map(|l| l.inv()).collect();
        for (sign, power) in [(Sign::Plus, w), (Sign::Minus, &inverse)] {
            let value = product(&product(&u, power.letters()), &u_inv);
            if seen.insert(value.clone()) {
                let stable = stable_count(&value);
                conjugates.push(Conjugate {
                    conjugator: u.clone(),
                    sign,
                    value,
                    stable,
                    exponent: sign.as_i64() * exponent_sum(w),
                });
            }
        }
    }
    let mut by_exponent: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, c) in conjugates.iter().enumerate() {
        by_exponent.entry(c.exponent).or_default().push(i);
    }
    let tries =
        by_exponent.into_iter().map(|(e, ids)| (e, Trie::new(ids.into_iter().map(|i| (i, &conjugates[i]))))).collect();
    let search = Search {
        tries,
        target,
        target_stable: target.exponents().iter().map(|q| q.unsigned_abs() as usize).sum(),
        target_sum: target.exponent_sum(),
        step: exponent_sum(w).abs(),
        conjugates,
    };
    for k in 1..=bounds.products {
        if let Some((_, ids)) = search.level(k) {
            let factors: Vec<ConjugateFactor> = ids
                .iter()
                .map(|&i| ConjugateFactor {
                    conjugator: MixedWord::from_letters(search.conjugates[i].conjugator.iter().copied()),
                    sign: search.conjugates[i].sign,
                })
                .collect();
            let value = ids.iter().fold(Vec::new(), |acc, &i| product(&acc, &search.conjugates[i].value));
            return Ok(Some(ClosureWitness { element: MixedWord::from_letters(value), factors }));
        }
    }
    Ok(None)
}
