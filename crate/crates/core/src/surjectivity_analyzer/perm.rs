use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_integer::Integer;
use serde::Serialize;

use super::{AnalyzeError, Presentation};
use crate::word_algebra::{t_shape, Letter, MixedWord};

pub const MAX_DEGREE: usize = 8;

const UNSET: usize = usize::MAX;

/// A permutation of `0..n` as its list of images.
pub type Permutation = Vec<usize>;

/// A homomorphism onto permutations in which the image of `t` lies outside
/// the subgroup generated by the images of the base generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientCertificate {
    pub degree: usize,
    pub images: BTreeMap<char, Permutation>,
    pub base_image_order: usize,
    pub witness: String,
}

/// Letters as `(generator index, inverse)`, with `t` last.
fn encode(pres: &Presentation, w: &MixedWord) -> Vec<(usize, bool)> {
    let symbols = pres.symbols();
    let t_index = symbols.len() - 1;
    w.letters()
        .iter()
        .map(|&l| match l {
            Letter::Base(b) => {
                (symbols.iter().position(|&s| s == b.generator.symbol()).expect("checked alphabet"), b.inverse)
            }
            Letter::Stable { inverse } => (t_index, inverse),
        })
        .collect()
}

/// Partitions of `n` into descending parts, in descending lexicographic order.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// The permutation with consecutive cycles of the given lengths.
fn cycle_type_representative(parts: &[usize]) -> Permutation {
    let mut perm = Vec::new();
    let mut start = 0;
    for &len in parts {
        for k in 0..len {
            perm.push(start + (k + 1) % len);
        }
        start += len;
    }
    perm
}

struct Enumerator<'a> {
    n: usize,
    generators: usize,
    relators: &'a [Vec<(usize, bool)>],
    fwd: Vec<Vec<usize>>,
    bwd: Vec<Vec<usize>>,
}

impl Enumerator<'_> {
    fn apply(&self, (g, inverse): (usize, bool), x: usize) -> usize {
        if inverse {
            self.bwd[g][x]
        } else {
            self.fwd[g][x]
        }
    }

    /// No relator traced all the way round from any point ends elsewhere.
    fn consistent(&self) -> bool {
        self.relators.iter().all(|r| {
            (0..self.n).all(|start| {
                let mut x = start;
                for &l in r {
                    x = self.apply(l, x);
                    if x == UNSET {
                        return true;
                    }
                }
                x == start
            })
        })
    }

    /// Visits complete assignments in lexicographic order of images until
    /// `visit` returns true.
    fn run(&mut self, slot: usize, visit: &mut dyn FnMut(&[Permutation]) -> bool) -> bool {
        let total = (self.generators - 1) * self.n;
        if slot == total {
            return visit(&self.fwd);
        }
        let (g, p) = (1 + slot / self.n, slot % self.n);
        for q in 0..self.n {
            if self.bwd[g][q] != UNSET {
                continue;
            }
            self.fwd[g][p] = q;
            self.bwd[g][q] = p;
            if self.consistent() && self.run(slot + 1, visit) {
                return true;
            }
            self.fwd[g][p] = UNSET;
            self.bwd[g][q] = UNSET;
        }
        false
    }
}

/// Visits every relator-satisfying assignment of degree `n`, up to
/// relabelling points, with the first generator's image a cycle-type
/// representative. Stops early when `visit` returns true.
fn for_each_homomorphism(pres: &Presentation, n: usize, visit: &mut dyn FnMut(&[Permutation]) -> bool) -> bool {
    let relators: Vec<Vec<(usize, bool)>> = pres.relators.iter().map(|r| encode(pres, r)).collect();
    let generators = pres.symbols().len();
    for parts in partitions(n) {
        let first = cycle_type_representative(&parts);
        let mut first_inv = vec![0; n];
        for (i, &j) in first.iter().enumerate() {
            first_inv[j] = i;
        }
        let mut fwd = vec![vec![UNSET; n]; generators];
        let mut bwd = vec![vec![UNSET; n]; generators];
        fwd[0] = first;
        bwd[0] = first_inv;
        let mut e = Enumerator { n, generators, relators: &relators, fwd, bwd };
        if e.consistent() && e.run(0, visit) {
            return true;
        }
    }
    false
}

fn compose(a: &[usize], b: &[usize]) -> Permutation {
    // Apply a, then b.
    a.iter().map(|&x| b[x]).collect()
}

/// Elements of the group generated by `gens`, stopping early once `stop`
/// is reached.
fn closure(gens: &[&Permutation], n: usize, stop: Option<&Permutation>) -> (HashSet<Permutation>, bool) {
    let identity: Permutation = (0..n).collect();
    let mut seen = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        if Some(&x) == stop {
            return (seen, true);
        }
        for g in gens {
            let y = compose(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    (seen, false)
}

fn base_orbits_contain(images: &[Permutation], t: &Permutation) -> bool {
    let n = t.len();
    (0..n).all(|p| {
        let mut orbit = BTreeSet::from([p]);
        let mut stack = vec![p];
        while let Some(x) = stack.pop() {
            for g in images {
                if orbit.insert(g[x]) {
                    stack.push(g[x]);
                }
            }
        }
        orbit.contains(&t[p])
    })
}

fn check_degree(max_degree: usize) -> Result<(), AnalyzeError> {
    if max_degree > MAX_DEGREE {
        return Err(AnalyzeError::DegreeTooLarge(max_degree));
    }
    Ok(())
}

fn certificate(pres: &Presentation, images: &[Permutation]) -> QuotientCertificate {
    let symbols = pres.symbols();
    let n = images[0].len();
    let base: Vec<&Permutation> = images[..images.len() - 1].iter().collect();
    let (group, _) = closure(&base, n, None);
    let names: Vec<String> = symbols[..symbols.len() - 1].iter().map(char::to_string).collect();
    QuotientCertificate {
        degree: n,
        images: symbols.iter().copied().zip(images.iter().cloned()).collect(),
        base_image_order: group.len(),
        witness: format!(
            "image of t lies outside the subgroup of order {} generated by the images of {}",
            group.len(),
            names.join(", ")
        ),
    }
}

/// First assignment, by degree and then in enumeration order, under which
/// every relator is trivial and `t` is not in the image of `G`.
pub fn quotient_certificate(
    pres: &Presentation,
    max_degree: usize,
) -> Result<Option<QuotientCertificate>, AnalyzeError> {
    check_degree(max_degree)?;
    for n in 2..=max_degree {
        let mut found = None;
        for_each_homomorphism(pres, n, &mut |images| {
            let (t, base) = images.split_last().expect("t is always present");
            if base_orbits_contain(base, t) {
                let gens: Vec<&Permutation> = base.iter().collect();
                if closure(&gens, n, Some(t)).1 {
                    return false;
                }
            }
            found = Some(images.to_vec());
            true
        });
        if let Some(images) = found {
            return Ok(Some(certificate(pres, &images)));
        }
    }
    Ok(None)
}

fn evaluate(pres: &Presentation, images: &BTreeMap<char, Permutation>, w: &MixedWord, n: usize) -> Option<Permutation> {
    let symbols = pres.symbols();
    let mut acc: Permutation = (0..n).collect();
    for (g, inverse) in encode(pres, w) {
        let p = images.get(&symbols[g])?;
        if p.len() != n {
            return None;
        }
        let step = if inverse {
            let mut inv = vec![0; n];
            for (i, &j) in p.iter().enumerate() {
                inv[j] = i;
            }
            inv
        } else {
            p.clone()
        };
        acc = compose(&acc, &step);
    }
    Some(acc)
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    p.len() == n && p.iter().collect::<BTreeSet<_>>().len() == n && p.iter().all(|&x| x < n)
}

/// Rechecks a certificate from scratch by composing whole permutations and
/// growing the base subgroup as a set closed under products.
pub fn verify_certificate(pres: &Presentation, cert: &QuotientCertificate) -> bool {
    let n = cert.degree;
    let symbols = pres.symbols();
    if symbols.iter().any(|s| !cert.images.get(s).is_some_and(|p| is_permutation(p, n))) {
        return false;
    }
    let identity: Permutation = (0..n).collect();
    if !pres.relators.iter().all(|r| evaluate(pres, &cert.images, r, n).as_ref() == Some(&identity)) {
        return false;
    }
    let base: Vec<&Permutation> = symbols[..symbols.len() - 1].iter().map(|s| &cert.images[s]).collect();
    let mut group: BTreeSet<Permutation> = BTreeSet::from([identity]);
    loop {
        let next: BTreeSet<Permutation> =
            group.iter().flat_map(|x| base.iter().map(move |g| compose(x, g))).chain(group.iter().cloned()).collect();
        if next.len() == group.len() {
            break;
        }
        group = next;
    }
    group.len() == cert.base_image_order && !group.contains(&cert.images[&'t'])
}

fn perm_order(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut order = 1;
    for start in 0..p.len() {
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        if len > 0 {
            order = order.lcm(&len);
        }
    }
    order
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeOrder {
    pub degree: usize,
    pub order: usize,
    /// Order of the whole image group for the assignment attaining `order`.
    pub image_order: usize,
    pub images: BTreeMap<char, Permutation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderEvidence {
    /// Largest order of the image of `x` found; the order of `x` in the
    /// group is a multiple of it.
    pub best: usize,
    pub per_degree: Vec<DegreeOrder>,
}

/// Largest order of the image of `x` over all permutation quotients of
/// degree at most `max_degree`.
pub fn order_evidence(x: &MixedWord, pres: &Presentation, max_degree: usize) -> Result<OrderEvidence, AnalyzeError> {
    check_degree(max_degree)?;
    let shape = t_shape(x);
    let e = shape.exponents();
    let valid = match e {
        [n] => *n > 0,
        _ => !e.is_empty() && e.iter().all(|&q| q == 1),
    };
    if !valid {
        return Err(AnalyzeError::ShapePrecondition(shape.to_string()));
    }
    super::check_alphabet(&pres.generators, x)?;
    let symbols = pres.symbols();
    let mut per_degree = Vec::new();
    for n in 1..=max_degree {
        let mut best: Option<(usize, Vec<Permutation>)> = None;
        for_each_homomorphism(pres, n, &mut |images| {
            let named: BTreeMap<char, Permutation> = symbols.iter().copied().zip(images.iter().cloned()).collect();
            let order = perm_order(&evaluate(pres, &named, x, n).expect("complete assignment"));
            if best.as_ref().is_none_or(|(b, _)| order > *b) {
                best = Some((order, images.to_vec()));
            }
            false
        });
        if let Some((order, images)) = best {
            let gens: Vec<&Permutation> = images.iter().collect();
            let image_order = closure(&gens, n, None).0.len();
            per_degree.push(DegreeOrder {
                degree: n,
                order,
                image_order,
                images: symbols.iter().copied().zip(images).collect(),
            });
        }
    }
    let best = per_degree.iter().map(|d| d.order).max().unwrap_or(1);
    Ok(OrderEvidence { best, per_degree })
}
