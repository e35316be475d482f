//! Small permutation groups: closure, cycle types, orbit data, cycle-type
//! fingerprints and subgroup classes.
//!
//! Points are 1-based in cycle notation and 0-based internally. Products
//! apply left to right: `a.then(&b)` maps x to b(a(x)).

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

pub const DEFAULT_CAP: usize = 20160;
pub const SUBGROUP_SCAN_CAP: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("cannot parse permutation {0:?}: {1}")]
    Parse(String, String),
    #[error("permutations of different degrees ({0} and {1})")]
    DegreeMismatch(usize, usize),
    #[error("group order exceeds cap {cap} (enumerated {partial} elements)")]
    CapExceeded { cap: usize, partial: usize },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("inertia suborbits of unequal sizes {0:?} inside one orbit")]
    UnequalSuborbits(Vec<usize>),
    #[error("subgroup is not contained in the group")]
    NotContained,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u16).collect())
    }

    /// From 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::Parse(format!("{images:?}"), "not a bijection".into()));
            }
            seen[i] = true;
        }
        Ok(Perm(images.into_iter().map(|i| i as u16).collect()))
    }

    /// Parses cycle notation such as `(1 2 3)(4 5)` on points 1..=n.
    pub fn parse(src: &str, n: usize) -> Result<Self, PermError> {
        let err = |m: &str| PermError::Parse(src.to_string(), m.to_string());
        let mut img: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        let mut rest = src.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| err("expected '('"))?;
            let close = body.find(')').ok_or_else(|| err("unclosed cycle"))?;
            let cycle: Vec<usize> = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| err("bad point")))
                .collect::<Result<_, _>>()?;
            for &x in &cycle {
                if x == 0 || x > n {
                    return Err(err(&format!("point {x} outside 1..{n}")));
                }
                if used[x - 1] {
                    return Err(err(&format!("point {x} repeated")));
                }
                used[x - 1] = true;
            }
            for (i, &x) in cycle.iter().enumerate() {
                img[x - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
            rest = body[close + 1..].trim_start();
        }
        Perm::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Image of a 0-based point.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self` followed by `o`.
    pub fn then(&self, o: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| o.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Perm(inv)
    }

    pub fn pow(&self, k: i64) -> Perm {
        let ord = self.order() as i64;
        let k = k.rem_euclid(ord);
        let mut out = Perm::identity(self.degree());
        for _ in 0..k {
            out = out.then(self);
        }
        out
    }

    /// `g⁻¹ · self · g`.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    /// Cycles including fixed points, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut c = vec![i];
            seen[i] = true;
            let mut j = self.apply(i);
            while j != i {
                seen[j] = true;
                c.push(j);
                j = self.apply(j);
            }
            out.push(c);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.cycles().iter().map(Vec::len).collect())
    }

    pub fn order(&self) -> usize {
        self.cycles().iter().fold(1, |acc, c| num_integer::lcm(acc, c.len()))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles() {
            if c.len() > 1 {
                any = true;
                let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
                write!(f, "({})", pts.join(" "))?;
            }
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Cycle type of g^k.
pub fn power_cycle_type(g: &Perm, k: i64) -> CycleType {
    g.pow(k).cycle_type()
}

/// Partition of n, parts in descending order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&x| x == 1)
    }

    /// Order of an element with this cycle type.
    pub fn order(&self) -> usize {
        self.0.iter().fold(1, |a, &b| num_integer::lcm(a, b))
    }

    /// Comma list, e.g. `4,2,1`.
    pub fn parse(src: &str) -> Result<Self, PermError> {
        let parts = src
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| PermError::Parse(src.into(), "bad cycle type".into())))
            .collect::<Result<Vec<_>, _>>()?;
        if parts.is_empty() || parts.contains(&0) {
            return Err(PermError::Parse(src.into(), "bad cycle type".into()));
        }
        Ok(CycleType::new(parts))
    }

    /// Exponent notation, e.g. `2^2 1^3`.
    pub fn pretty(&self) -> String {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let j = self.0[i..].iter().take_while(|&&x| x == self.0[i]).count();
            out.push(if j == 1 { self.0[i].to_string() } else { format!("{}^{}", self.0[i], j) });
            i += j;
        }
        out.join(" ")
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

impl Serialize for CycleType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A permutation group with all elements enumerated.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

/// Enumerates ⟨gens⟩ by closure on `degree` points.
pub fn generate(gens: &[Perm], degree: usize, cap: usize) -> Result<PermGroup, PermError> {
    for g in gens {
        if g.degree() != degree {
            return Err(PermError::DegreeMismatch(degree, g.degree()));
        }
    }
    let id = Perm::identity(degree);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let y = elements[i].then(g);
            if !index.contains_key(&y) {
                if elements.len() >= cap {
                    return Err(PermError::CapExceeded { cap, partial: elements.len() });
                }
                index.insert(y.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(y);
            }
        }
    }
    Ok(PermGroup { degree, gens: gens.to_vec(), elements, index })
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        generate(&[], degree, 1).expect("trivial group")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.index.contains_key(g)
    }

    pub fn is_subgroup_of(&self, big: &PermGroup) -> bool {
        self.gens.iter().all(|g| big.contains(g))
    }

    /// Normality of `self` in `big` (requires containment).
    pub fn is_normal_in(&self, big: &PermGroup) -> bool {
        self.is_subgroup_of(big)
            && big.gens.iter().all(|g| self.gens.iter().all(|h| self.contains(&h.conjugate_by(g))))
    }

    /// Orbits as sorted 0-based point lists, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orb = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < orb.len() {
                let x = orb[i];
                for g in &self.gens {
                    let y = g.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orb.push(y);
                    }
                }
                i += 1;
            }
            orb.sort_unstable();
            out.push(orb);
        }
        out
    }

    pub fn orbit_lengths(&self) -> CycleType {
        CycleType::new(self.orbits().iter().map(Vec::len).collect())
    }

    /// Number of elements of each cycle type.
    pub fn cycle_type_counts(&self) -> BTreeMap<CycleType, usize> {
        let mut m = BTreeMap::new();
        for g in &self.elements {
            *m.entry(g.cycle_type()).or_insert(0) += 1;
        }
        m
    }

    /// Fraction of elements of each cycle type.
    pub fn fingerprint(&self) -> BTreeMap<CycleType, Ratio<usize>> {
        let n = self.order();
        self.cycle_type_counts().into_iter().map(|(k, c)| (k, Ratio::new(c, n))).collect()
    }

    /// Stabilizer of a point (by filtering the enumeration).
    pub fn stabilizer_order(&self, point: usize) -> usize {
        self.elements.iter().filter(|g| g.apply(point) == point).count()
    }
}

/// (e, f) data modelled by inertia `i` inside decomposition group `d0`: for
/// each `d0`-orbit, e is the common size of the `i`-suborbits and f their
/// number.
pub fn ef_multiset(i: &PermGroup, d0: &PermGroup) -> Result<Vec<(usize, usize)>, PermError> {
    if !i.is_subgroup_of(d0) {
        return Err(PermError::NotContained);
    }
    if !i.is_normal_in(d0) {
        return Err(PermError::NotNormal);
    }
    let inner = i.orbits();
    let mut owner = vec![0usize; i.degree()];
    for (k, o) in inner.iter().enumerate() {
        for &x in o {
            owner[x] = k;
        }
    }
    let mut out = Vec::new();
    for orbit in d0.orbits() {
        let subs: HashSet<usize> = orbit.iter().map(|&x| owner[x]).collect();
        let sizes: Vec<usize> = subs.iter().map(|&k| inner[k].len()).collect();
        if sizes.iter().any(|&s| s != sizes[0]) {
            let mut s = sizes.clone();
            s.sort_unstable();
            return Err(PermError::UnequalSuborbits(s));
        }
        out.push((sizes[0], subs.len()));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(out)
}

/// A conjugacy class of subgroups.
#[derive(Clone, Debug)]
pub struct SubgroupClass {
    pub representative: PermGroup,
    pub class_size: usize,
}

impl SubgroupClass {
    pub fn order(&self) -> usize {
        self.representative.order()
    }
}

struct Table {
    mul: Vec<u16>,
    n: usize,
}

impl Table {
    fn new(g: &PermGroup) -> Self {
        let n = g.order();
        let mut mul = vec![0u16; n * n];
        for (a, x) in g.elements.iter().enumerate() {
            for (b, y) in g.elements.iter().enumerate() {
                mul[a * n + b] = g.index[&x.then(y)] as u16;
            }
        }
        Table { mul, n }
    }

    fn closure(&self, mut bits: Vec<u64>, gens: &[usize]) -> Vec<u64> {
        let mut members: Vec<usize> = (0..self.n).filter(|&i| bits[i / 64] >> (i % 64) & 1 == 1).collect();
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &g in gens {
                let y = self.mul[x * self.n + g] as usize;
                if bits[y / 64] >> (y % 64) & 1 == 0 {
                    bits[y / 64] |= 1 << (y % 64);
                    members.push(y);
                }
            }
            i += 1;
        }
        bits
    }
}

/// Conjugacy classes of subgroups generated by at most three elements
/// whose orbit lengths equal `lengths`.
pub fn subgroups_with_orbit_lengths(g: &PermGroup, lengths: &CycleType) -> Result<Vec<SubgroupClass>, PermError> {
    if g.order() > SUBGROUP_SCAN_CAP {
        return Err(PermError::CapExceeded { cap: SUBGROUP_SCAN_CAP, partial: g.order() });
    }
    let table = Table::new(g);
    let words = g.order().div_ceil(64);
    let mut id_bits = vec![0u64; words];
    id_bits[0] = 1;
    let mut found: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    let mut layer: Vec<(Vec<u64>, Vec<usize>)> = Vec::new();
    for x in 0..g.order() {
        let b = table.closure(id_bits.clone(), &[x]);
        if !found.contains_key(&b) {
            found.insert(b.clone(), vec![x]);
            layer.push((b, vec![x]));
        }
    }
    let cyclic: Vec<(Vec<u64>, usize)> = layer.iter().map(|(b, gs)| (b.clone(), gs[0])).collect();
    for _ in 1..3 {
        let mut next = Vec::new();
        for (bits, gens) in &layer {
            for (_, c) in &cyclic {
                if bits[c / 64] >> (c % 64) & 1 == 1 {
                    continue;
                }
                let mut all = gens.clone();
                all.push(*c);
                let b = table.closure(bits.clone(), &all);
                if !found.contains_key(&b) {
                    found.insert(b.clone(), all.clone());
                    next.push((b, all));
                }
            }
        }
        layer = next;
    }
    let mut classes: BTreeMap<Vec<u64>, (Vec<usize>, usize)> = BTreeMap::new();
    let inverses: Vec<usize> = g.elements.iter().map(|x| g.index[&x.inverse()]).collect();
    for (bits, gens) in found {
        let h = generate(&gens.iter().map(|&k| g.elements[k].clone()).collect::<Vec<_>>(), g.degree, g.order())?;
        if &h.orbit_lengths() != lengths {
            continue;
        }
        let members: Vec<usize> = (0..g.order()).filter(|&i| bits[i / 64] >> (i % 64) & 1 == 1).collect();
        let mut conj = HashSet::new();
        for c in 0..g.order() {
            let mut cb = vec![0u64; words];
            for &m in &members {
                let y = table.mul[table.mul[inverses[c] * table.n + m] as usize * table.n + c] as usize;
                cb[y / 64] |= 1 << (y % 64);
            }
            conj.insert(cb);
        }
        let canon = conj.iter().min().unwrap().clone();
        classes.entry(canon).or_insert((gens, conj.len()));
    }
    classes
        .into_values()
        .map(|(gens, size)| {
            let rep = generate(&gens.iter().map(|&k| g.elements[k].clone()).collect::<Vec<_>>(), g.degree, g.order())?;
            Ok(SubgroupClass { representative: rep, class_size: size })
        })
        .collect()
}
