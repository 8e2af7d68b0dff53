use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::Perm;

/// One level of a stabilizer chain: the orbit of `point` under this level's
/// strong generators, with a transversal element per orbit point.
#[derive(Clone, Debug)]
struct Level {
    point: usize,
    gens: Vec<Perm>,
    orbit: Vec<usize>,
    /// `transversal[β]` maps `point` to `β`; `None` outside the orbit.
    transversal: Vec<Option<Perm>>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Level {
        Level {
            point,
            gens: Vec::new(),
            orbit: Vec::new(),
            transversal: vec![None; degree],
        }
    }

    fn recompute(&mut self, degree: usize) {
        self.orbit.clear();
        self.transversal = vec![None; degree];
        self.orbit.push(self.point);
        self.transversal[self.point] = Some(Perm::identity(degree));
        let mut i = 0;
        while i < self.orbit.len() {
            let beta = self.orbit[i];
            for g in &self.gens {
                let gamma = g.apply(beta);
                if self.transversal[gamma].is_none() {
                    let t_beta = self.transversal[beta].as_ref().unwrap();
                    self.transversal[gamma] = Some(g.compose_unchecked(t_beta));
                    self.orbit.push(gamma);
                }
            }
            i += 1;
        }
    }
}

/// A permutation group held as its generators plus a base and strong
/// generating set (stabilizer chain), built by deterministic Schreier-Sims.
/// Construction is exact: the order is the product of fundamental orbit
/// lengths and membership is decided by sifting.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: Vec<Level>,
    order: u128,
}

impl PermGroup {
    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup {
            degree,
            gens: Vec::new(),
            chain: Vec::new(),
            order: 1,
        }
    }

    /// Builds the group generated by `gens` on `degree` points. Identity
    /// generators are dropped; an empty list yields the trivial group. Base
    /// points are chosen deterministically (smallest moved point first).
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<PermGroup> {
        PermGroup::build(degree, gens, None)
    }

    /// Like [`PermGroup::new`] but with a caller-chosen first base point,
    /// which makes the chain suffix after one level a point stabilizer.
    pub fn with_first_base(degree: usize, gens: Vec<Perm>, base0: usize) -> Result<PermGroup> {
        if base0 >= degree {
            return Err(Error::Validation(format!(
                "base point {} out of range for degree {}",
                base0, degree
            )));
        }
        PermGroup::build(degree, gens, Some(base0))
    }

    fn build(degree: usize, gens: Vec<Perm>, base0: Option<usize>) -> Result<PermGroup> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::Validation(format!(
                    "generator degree {} does not match group degree {}",
                    g.degree(),
                    degree
                )));
            }
        }
        let nontrivial: Vec<Perm> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        if nontrivial.is_empty() && base0.is_none() {
            return Ok(PermGroup::trivial(degree));
        }
        let first = base0.unwrap_or_else(|| {
            nontrivial
                .iter()
                .flat_map(|g| (0..degree).find(|&x| g.apply(x) != x))
                .min()
                .unwrap_or(0)
        });
        let mut builder = Builder {
            degree,
            levels: vec![Level::new(first, degree)],
        };
        builder.levels[0].gens = nontrivial.clone();
        builder.schreier_sims_at(0);
        let order = builder.order()?;
        Ok(PermGroup {
            degree,
            gens: nontrivial,
            chain: builder.levels,
            order,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The (nontrivial) generators the group was built from.
    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    /// Exact group order. Computed once at construction; construction fails
    /// with a capacity error if the order overflows `u128`.
    pub fn order(&self) -> u128 {
        self.order
    }

    /// The base point sequence of the stabilizer chain.
    pub fn base(&self) -> Vec<usize> {
        self.chain.iter().map(|l| l.point).collect()
    }

    fn sift_from(&self, start: usize, p: &Perm) -> (Perm, usize) {
        let mut p = p.clone();
        for l in start..self.chain.len() {
            let level = &self.chain[l];
            let beta = p.apply(level.point);
            match &level.transversal[beta] {
                None => return (p, l),
                Some(t) => p = t.inverse().compose_unchecked(&p),
            }
        }
        let end = self.chain.len();
        (p, end)
    }

    /// Membership by sifting.
    pub fn contains(&self, p: &Perm) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::Validation(format!(
                "permutation degree {} does not match group degree {}",
                p.degree(),
                self.degree
            )));
        }
        let (residue, _) = self.sift_from(0, p);
        Ok(residue.is_identity())
    }

    /// The subgroup fixing `v`, with its own valid stabilizer chain. When the
    /// chain is not already based at `v` the group is rebuilt from its
    /// generators with `v` as the first base point.
    pub fn point_stabilizer(&self, v: usize) -> Result<PermGroup> {
        if v >= self.degree {
            return Err(Error::Validation(format!(
                "vertex {} out of range for degree {}",
                v, self.degree
            )));
        }
        let based = if self.chain.first().map(|l| l.point) == Some(v) {
            self.clone()
        } else {
            PermGroup::build(self.degree, self.gens.clone(), Some(v))?
        };
        if based.chain.len() <= 1 {
            return Ok(PermGroup::trivial(self.degree));
        }
        let chain: Vec<Level> = based.chain[1..].to_vec();
        let gens = chain[0].gens.clone();
        let order = chain
            .iter()
            .try_fold(1u128, |acc, l| acc.checked_mul(l.orbit.len() as u128))
            .ok_or_else(|| Error::Capacity("group order overflows u128".into()))?;
        Ok(PermGroup {
            degree: self.degree,
            gens,
            chain,
            order,
        })
    }

    /// The orbit of `v` under the group, sorted ascending.
    pub fn orbit_of(&self, v: usize) -> Result<Vec<usize>> {
        if v >= self.degree {
            return Err(Error::Validation(format!(
                "vertex {} out of range for degree {}",
                v, self.degree
            )));
        }
        let mut seen = vec![false; self.degree];
        seen[v] = true;
        let mut queue = vec![v];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            for g in &self.gens {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
            i += 1;
        }
        queue.sort_unstable();
        Ok(queue)
    }

    /// Orbits of the group within `set`, which must be invariant under the
    /// group. Orbits are sorted internally and listed by smallest element.
    pub fn orbit_on_set(&self, set: &[usize]) -> Result<Vec<Vec<usize>>> {
        let mut members = vec![false; self.degree];
        for &v in set {
            if v >= self.degree {
                return Err(Error::Validation(format!(
                    "vertex {} out of range for degree {}",
                    v, self.degree
                )));
            }
            members[v] = true;
        }
        let mut done = vec![false; self.degree];
        let mut orbits = Vec::new();
        for &v in set {
            if done[v] {
                continue;
            }
            let orbit = self.orbit_of(v)?;
            for &x in &orbit {
                if !members[x] {
                    return Err(Error::Invariance(format!(
                        "orbit of {} leaves the given set at {}",
                        v, x
                    )));
                }
                done[x] = true;
            }
            orbits.push(orbit);
        }
        orbits.sort_by_key(|o| o[0]);
        Ok(orbits)
    }

    /// True iff `p` commutes with every generator; centrality is closed
    /// under products, so this decides centrality in the whole group.
    pub fn is_central(&self, p: &Perm) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::Validation(format!(
                "permutation degree {} does not match group degree {}",
                p.degree(),
                self.degree
            )));
        }
        for g in &self.gens {
            if !p.commutes_with(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Is `h` (which must be a subgroup: every generator a member) normal in
    /// this group? Checks `a·b·a⁻¹ ∈ h` over generator pairs, which suffices
    /// for finite groups.
    pub fn is_normal_subgroup(&self, h: &PermGroup) -> Result<bool> {
        if h.degree != self.degree {
            return Err(Error::Validation(format!(
                "subgroup degree {} does not match group degree {}",
                h.degree, self.degree
            )));
        }
        for b in &h.gens {
            if !self.contains(b)? {
                return Err(Error::Containment(format!(
                    "claimed subgroup generator {} is not a member",
                    b
                )));
            }
        }
        for a in &self.gens {
            let a_inv = a.inverse();
            for b in &h.gens {
                let conj = a.compose_unchecked(b).compose_unchecked(&a_inv);
                if !h.contains(&conj)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Iterates every element exactly once as a product of transversal
    /// representatives down the chain. Errors if the order exceeds `cap`.
    pub fn elements(&self, cap: u128) -> Result<Elements<'_>> {
        if self.order > cap {
            return Err(Error::Capacity(format!(
                "group order {} exceeds enumeration cap {}",
                self.order, cap
            )));
        }
        Ok(Elements {
            group: self,
            idx: vec![0; self.chain.len()],
            prefix: Vec::new(),
            done: false,
        })
    }
}

impl Serialize for PermGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PermGroup", 3)?;
        s.serialize_field("degree", &self.degree)?;
        s.serialize_field("gens", &self.gens)?;
        s.serialize_field("order", &self.order.to_string())?;
        s.end()
    }
}

pub struct Elements<'a> {
    group: &'a PermGroup,
    idx: Vec<usize>,
    /// `prefix[l]` = product of transversal representatives for levels 0..=l.
    prefix: Vec<Perm>,
    done: bool,
}

impl Elements<'_> {
    fn rep(&self, level: usize) -> &Perm {
        let l = &self.group.chain[level];
        l.transversal[l.orbit[self.idx[level]]].as_ref().unwrap()
    }

    fn rebuild_from(&mut self, from: usize) {
        self.prefix.truncate(from);
        for l in from..self.idx.len() {
            let p = if l == 0 {
                self.rep(0).clone()
            } else {
                self.prefix[l - 1].compose_unchecked(self.rep(l))
            };
            self.prefix.push(p);
        }
    }
}

impl Iterator for Elements<'_> {
    type Item = Perm;

    fn next(&mut self) -> Option<Perm> {
        if self.done {
            return None;
        }
        if self.idx.is_empty() {
            // trivial group
            self.done = true;
            return Some(Perm::identity(self.group.degree));
        }
        if self.prefix.is_empty() {
            self.rebuild_from(0);
            return Some(self.prefix.last().unwrap().clone());
        }
        // odometer increment, deepest level fastest
        let mut l = self.idx.len();
        loop {
            if l == 0 {
                self.done = true;
                return None;
            }
            l -= 1;
            self.idx[l] += 1;
            if self.idx[l] < self.group.chain[l].orbit.len() {
                break;
            }
            self.idx[l] = 0;
        }
        self.rebuild_from(l);
        Some(self.prefix.last().unwrap().clone())
    }
}

struct Builder {
    degree: usize,
    levels: Vec<Level>,
}

impl Builder {
    fn sift(&self, start: usize, p: Perm) -> (Perm, usize) {
        let mut p = p;
        for l in start..self.levels.len() {
            let level = &self.levels[l];
            let beta = p.apply(level.point);
            match &level.transversal[beta] {
                None => return (p, l),
                Some(t) => p = t.inverse().compose_unchecked(&p),
            }
        }
        let end = self.levels.len();
        (p, end)
    }

    /// Verifies level `i` by Schreier's lemma, extending deeper levels with
    /// any Schreier generator that fails to sift. Assumes levels below `i`
    /// are already verified; re-verifies every level it touches.
    fn schreier_sims_at(&mut self, i: usize) {
        self.levels[i].recompute(self.degree);
        let orbit = self.levels[i].orbit.clone();
        let gens = self.levels[i].gens.clone();
        for &beta in &orbit {
            for g in &gens {
                let gamma = g.apply(beta);
                let t_beta = self.levels[i].transversal[beta].as_ref().unwrap();
                let t_gamma = self.levels[i].transversal[gamma].as_ref().unwrap();
                let schreier = t_gamma
                    .inverse()
                    .compose_unchecked(&g.compose_unchecked(t_beta));
                if schreier.is_identity() {
                    continue;
                }
                let (residue, stuck) = self.sift(i + 1, schreier);
                if residue.is_identity() {
                    continue;
                }
                if stuck == self.levels.len() {
                    let pt = (0..self.degree)
                        .find(|&x| residue.apply(x) != x)
                        .expect("non-identity residue moves a point");
                    self.levels.push(Level::new(pt, self.degree));
                }
                for l in i + 1..=stuck {
                    self.levels[l].gens.push(residue.clone());
                }
                for l in (i + 1..=stuck).rev() {
                    self.schreier_sims_at(l);
                }
            }
        }
    }

    fn order(&self) -> Result<u128> {
        self.levels
            .iter()
            .try_fold(1u128, |acc, l| acc.checked_mul(l.orbit.len() as u128))
            .ok_or_else(|| Error::Capacity("group order overflows u128".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Independent oracle: closure of a generator set under composition.
    fn closure(degree: usize, gens: &[Perm]) -> HashSet<Perm> {
        let mut set: HashSet<Perm> = HashSet::new();
        set.insert(Perm::identity(degree));
        let mut frontier: Vec<Perm> = vec![Perm::identity(degree)];
        while let Some(p) = frontier.pop() {
            for g in gens {
                let q = g.compose_unchecked(&p);
                if set.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        set
    }

    fn dihedral_gens(n: usize) -> Vec<Perm> {
        vec![Perm::translation(n, 1), Perm::negation(n)]
    }

    fn symmetric_gens(n: usize) -> Vec<Perm> {
        vec![Perm::transposition(n, 0, 1), Perm::translation(n, 1)]
    }

    fn all_perms(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut img: Vec<usize> = (0..n).collect();
        heap_permute(&mut img, n, &mut out);
        out
    }

    fn heap_permute(img: &mut Vec<usize>, k: usize, out: &mut Vec<Perm>) {
        if k == 1 {
            out.push(Perm::from_images(img.clone()).unwrap());
            return;
        }
        for i in 0..k {
            heap_permute(img, k - 1, out);
            if k % 2 == 0 {
                img.swap(i, k - 1);
            } else {
                img.swap(0, k - 1);
            }
        }
    }

    #[test]
    fn symmetric_group_order() {
        let g = PermGroup::new(5, symmetric_gens(5)).unwrap();
        assert_eq!(g.order(), 120);
    }

    #[test]
    fn dihedral_matches_naive_closure() {
        let gens = dihedral_gens(5);
        let g = PermGroup::new(5, gens.clone()).unwrap();
        let oracle = closure(5, &gens);
        assert_eq!(g.order(), oracle.len() as u128);
        assert_eq!(g.order(), 10);
        for p in all_perms(5) {
            assert_eq!(g.contains(&p).unwrap(), oracle.contains(&p));
        }
    }

    #[test]
    fn closure_agreement_on_more_groups() {
        // order at most 5000 in every case; membership must agree everywhere
        let cases: Vec<(usize, Vec<Perm>)> = vec![
            (6, dihedral_gens(6)),
            (4, symmetric_gens(4)),
            (6, vec![Perm::translation(6, 1)]),
            (
                4,
                vec![
                    Perm::from_images(vec![1, 2, 0, 3]).unwrap(),
                    Perm::from_images(vec![0, 2, 3, 1]).unwrap(),
                ],
            ),
            // A₅: even permutations only, so half of S₅ must sift and half must not
            (
                5,
                vec![
                    Perm::from_images(vec![1, 2, 0, 3, 4]).unwrap(),
                    Perm::from_images(vec![0, 1, 3, 4, 2]).unwrap(),
                ],
            ),
        ];
        for (degree, gens) in cases {
            let g = PermGroup::new(degree, gens.clone()).unwrap();
            let oracle = closure(degree, &gens);
            assert!(oracle.len() <= 5000);
            assert_eq!(g.order(), oracle.len() as u128);
            for p in all_perms(degree) {
                assert_eq!(g.contains(&p).unwrap(), oracle.contains(&p));
            }
        }
    }

    #[test]
    fn empty_generating_set_is_trivial() {
        let g = PermGroup::new(4, vec![]).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.contains(&Perm::identity(4)).unwrap());
        let g0 = PermGroup::new(0, vec![]).unwrap();
        assert_eq!(g0.order(), 1);
    }

    #[test]
    fn dihedral_membership_examples() {
        let d5 = PermGroup::new(5, dihedral_gens(5)).unwrap();
        let doubling = Perm::from_images(vec![0, 2, 4, 1, 3]).unwrap(); // x ↦ 2x
        assert!(!d5.contains(&doubling).unwrap());
        assert!(d5.contains(&Perm::identity(5)).unwrap());
        assert!(d5.contains(&Perm::negation(5)).unwrap());
    }

    #[test]
    fn point_stabilizers() {
        let d5 = PermGroup::new(5, dihedral_gens(5)).unwrap();
        let stab = d5.point_stabilizer(0).unwrap();
        assert_eq!(stab.order(), 2);
        let members: HashSet<Perm> = stab.elements(10).unwrap().collect();
        assert!(members.contains(&Perm::identity(5)));
        assert!(members.contains(&Perm::negation(5)));

        let s5 = PermGroup::new(5, symmetric_gens(5)).unwrap();
        assert_eq!(s5.point_stabilizer(0).unwrap().order(), 24);

        let trivial = PermGroup::trivial(3);
        assert_eq!(trivial.point_stabilizer(0).unwrap().order(), 1);
        assert!(d5.point_stabilizer(7).is_err());

        let rebased = PermGroup::with_first_base(5, dihedral_gens(5), 3).unwrap();
        assert_eq!(rebased.base()[0], 3);
        assert_eq!(rebased.order(), 10);
    }

    #[test]
    fn orbit_stabilizer_decomposition() {
        for (degree, gens) in [
            (5, dihedral_gens(5)),
            (6, symmetric_gens(6)),
            (8, vec![Perm::translation(8, 2)]),
        ] {
            let g = PermGroup::new(degree, gens).unwrap();
            for v in 0..degree {
                let orbit = g.orbit_of(v).unwrap();
                let stab = g.point_stabilizer(v).unwrap();
                assert_eq!(g.order(), orbit.len() as u128 * stab.order());
            }
        }
    }

    #[test]
    fn orbits_and_orbit_on_set() {
        let d5 = PermGroup::new(5, dihedral_gens(5)).unwrap();
        assert_eq!(d5.orbit_of(0).unwrap(), vec![0, 1, 2, 3, 4]);

        let trivial = PermGroup::trivial(5);
        assert_eq!(trivial.orbit_of(2).unwrap(), vec![2]);

        let stab = d5.point_stabilizer(0).unwrap(); // {id, −x}
        assert_eq!(stab.orbit_on_set(&[1, 4]).unwrap(), vec![vec![1, 4]]);
        assert_eq!(
            stab.orbit_on_set(&[1, 2, 3, 4]).unwrap(),
            vec![vec![1, 4], vec![2, 3]]
        );
        assert!(matches!(stab.orbit_on_set(&[1]), Err(Error::Invariance(_))));
    }

    #[test]
    fn centrality() {
        let d10 = PermGroup::new(10, dihedral_gens(10)).unwrap();
        assert!(d10.is_central(&Perm::translation(10, 5)).unwrap());
        assert!(d10.is_central(&Perm::identity(10)).unwrap());

        let d5 = PermGroup::new(5, dihedral_gens(5)).unwrap();
        assert!(!d5.is_central(&Perm::translation(5, 1)).unwrap());
        assert!(d5.is_central(&Perm::identity(5)).unwrap());
    }

    #[test]
    fn normality() {
        let d5 = PermGroup::new(5, dihedral_gens(5)).unwrap();
        let rotations = PermGroup::new(5, vec![Perm::translation(5, 1)]).unwrap();
        assert!(d5.is_normal_subgroup(&rotations).unwrap());

        let s5 = PermGroup::new(5, symmetric_gens(5)).unwrap();
        let swap = PermGroup::new(5, vec![Perm::transposition(5, 0, 1)]).unwrap();
        assert!(!s5.is_normal_subgroup(&swap).unwrap());

        assert!(d5.is_normal_subgroup(&PermGroup::trivial(5)).unwrap());
        // (0 1) is not an element of D₅, so it is not a subgroup at all
        assert!(matches!(
            d5.is_normal_subgroup(&swap),
            Err(Error::Containment(_))
        ));
    }

    #[test]
    fn element_enumeration() {
        let d5 = PermGroup::new(5, dihedral_gens(5)).unwrap();
        let elems: Vec<Perm> = d5.elements(100).unwrap().collect();
        assert_eq!(elems.len(), 10);
        let unique: HashSet<Perm> = elems.iter().cloned().collect();
        assert_eq!(unique, closure(5, &dihedral_gens(5)));

        let trivial = PermGroup::trivial(3);
        let elems: Vec<Perm> = trivial.elements(10).unwrap().collect();
        assert_eq!(elems, vec![Perm::identity(3)]);

        let s5 = PermGroup::new(5, symmetric_gens(5)).unwrap();
        assert!(matches!(s5.elements(100), Err(Error::Capacity(_))));
    }

    #[test]
    fn centrality_agrees_with_elementwise_check() {
        let d10 = PermGroup::new(10, dihedral_gens(10)).unwrap();
        for p in [
            Perm::translation(10, 5),
            Perm::translation(10, 1),
            Perm::negation(10),
        ] {
            let elementwise = d10
                .elements(1000)
                .unwrap()
                .all(|e| e.commutes_with(&p).unwrap());
            assert_eq!(d10.is_central(&p).unwrap(), elementwise);
        }
    }

    #[test]
    fn degree_mismatch_errors() {
        let d5 = PermGroup::new(5, dihedral_gens(5)).unwrap();
        assert!(d5.contains(&Perm::identity(6)).is_err());
        assert!(d5.is_central(&Perm::identity(6)).is_err());
        assert!(PermGroup::new(5, vec![Perm::identity(4)]).is_err());
    }

    #[test]
    fn order_overflow_is_a_capacity_error() {
        // 35! > u128::MAX
        assert!(matches!(
            PermGroup::new(35, symmetric_gens(35)),
            Err(Error::Capacity(_))
        ));
        // 34! still fits
        let s34 = PermGroup::new(34, symmetric_gens(34)).unwrap();
        assert_eq!(s34.order(), (2..=34u128).product::<u128>());
    }

    #[test]
    fn strong_generators_sift_to_identity() {
        let g = PermGroup::new(6, symmetric_gens(6)).unwrap();
        for level in &g.chain {
            for sg in &level.gens {
                assert!(g.contains(sg).unwrap());
            }
        }
    }

    #[test]
    fn group_serialization_shape() {
        let g = PermGroup::new(3, vec![Perm::translation(3, 1)]).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"degree":3,"gens":[[1,2,0]],"order":"3"}"#);
    }
}
