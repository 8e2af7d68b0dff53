//! Stability of a graph: compares Aut(B(X)) against Aut(X) × Z₂ by order,
//! by centrality of the colour-swapping involution, and by stabilizer
//! equality of antipodal vertices; classifies unstable graphs by their
//! trivial reasons; recognizes canonical double covers via strongly
//! switching involutions.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::aut::automorphism_group;
use crate::error::{Error, Result};
use crate::graph::{bipartite_double_cover, quotient_graph, Graph, Partition};
use crate::perm::Perm;

/// Element-enumeration cap for the switching-involution search.
pub const ELEMENT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Stable,
    TriviallyUnstable,
    NontriviallyUnstable,
    /// The classification targets unstable graphs; bipartite graphs with
    /// trivial automorphism group fall outside the trichotomy.
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Stable => "stable",
            Status::TriviallyUnstable => "trivially-unstable",
            Status::NontriviallyUnstable => "nontrivially-unstable",
            Status::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Reason {
    Disconnected,
    BipartiteWithNontrivialAut,
    Reducible,
    /// Bipartite input outside the criteria's scope (trivial automorphism
    /// group, or a criterion that assumes non-bipartiteness).
    Bipartite,
    None,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Disconnected => "disconnected",
            Reason::BipartiteWithNontrivialAut => "bipartite-with-nontrivial-aut",
            Reason::Reducible => "reducible",
            Reason::Bipartite => "bipartite",
            Reason::None => "none",
        }
    }
}

/// Per-graph stability verdict with the two automorphism group orders that
/// witnessed it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StabilityVerdict {
    pub status: Status,
    pub reason: Reason,
    pub aut_x_order: u128,
    pub aut_bx_order: u128,
}

impl Serialize for StabilityVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("StabilityVerdict", 4)?;
        s.serialize_field("status", self.status.as_str())?;
        s.serialize_field("reason", self.reason.as_str())?;
        s.serialize_field("autX", &self.aut_x_order.to_string())?;
        s.serialize_field("autBX", &self.aut_bx_order.to_string())?;
        s.end()
    }
}

/// The colour-swapping involution τ(v, i) = (v, i+1) of B(X) in the
/// `v + n·i` encoding.
pub fn tau(n: usize) -> Perm {
    Perm::from_images((0..2 * n).map(|x| (x + n) % (2 * n)).collect())
        .expect("swap of colour classes is a bijection")
}

fn orders(x: &Graph) -> Result<(u128, u128)> {
    let aut_x = automorphism_group(x)?.order();
    let b = bipartite_double_cover(x)?;
    let aut_bx = automorphism_group(&b)?.order();
    Ok((aut_x, aut_bx))
}

/// Stability by order comparison: Aut(X) × Z₂ always embeds in Aut(B(X)),
/// so for connected non-bipartite X equality |Aut(B(X))| = 2·|Aut(X)|
/// decides stability. Inputs outside that precondition get NotApplicable;
/// [`classify`] handles them.
pub fn is_stable_by_order(x: &Graph) -> Result<StabilityVerdict> {
    let (aut_x, aut_bx) = orders(x)?;
    if !x.is_connected() {
        return Ok(StabilityVerdict {
            status: Status::NotApplicable,
            reason: Reason::Disconnected,
            aut_x_order: aut_x,
            aut_bx_order: aut_bx,
        });
    }
    if x.is_bipartite() {
        return Ok(StabilityVerdict {
            status: Status::NotApplicable,
            reason: Reason::Bipartite,
            aut_x_order: aut_x,
            aut_bx_order: aut_bx,
        });
    }
    if aut_bx == 2 * aut_x {
        Ok(StabilityVerdict {
            status: Status::Stable,
            reason: Reason::None,
            aut_x_order: aut_x,
            aut_bx_order: aut_bx,
        })
    } else if !x.is_irreducible() {
        Ok(StabilityVerdict {
            status: Status::TriviallyUnstable,
            reason: Reason::Reducible,
            aut_x_order: aut_x,
            aut_bx_order: aut_bx,
        })
    } else {
        Ok(StabilityVerdict {
            status: Status::NontriviallyUnstable,
            reason: Reason::None,
            aut_x_order: aut_x,
            aut_bx_order: aut_bx,
        })
    }
}

fn require_connected_nonbipartite(x: &Graph, what: &str) -> Result<()> {
    if !x.is_connected() {
        return Err(Error::Applicability(format!(
            "{} requires a connected graph",
            what
        )));
    }
    if x.is_bipartite() {
        return Err(Error::Applicability(format!(
            "{} requires a non-bipartite graph",
            what
        )));
    }
    Ok(())
}

/// Stability via centrality of τ in Aut(B(X)).
pub fn is_stable_by_tau_central(x: &Graph) -> Result<bool> {
    require_connected_nonbipartite(x, "the centrality criterion")?;
    let b = bipartite_double_cover(x)?;
    let aut = automorphism_group(&b)?;
    aut.is_central(&tau(x.vertex_count()))
}

/// Stability via equality of the stabilizers of the two copies of a vertex:
/// for connected non-bipartite vertex-transitive X, X is stable iff
/// A_{(v,0)} = A_{(v,1)} in A = Aut(B(X)). Checked for v = 0 by comparing
/// orders and sifting one side's generators through the other.
pub fn is_stable_by_stabilizer(x: &Graph) -> Result<bool> {
    require_connected_nonbipartite(x, "the stabilizer criterion")?;
    let n = x.vertex_count();
    let aut_x = automorphism_group(x)?;
    if aut_x.orbit_of(0)?.len() != n {
        return Err(Error::Applicability(
            "the stabilizer criterion requires a vertex-transitive graph".into(),
        ));
    }
    let b = bipartite_double_cover(x)?;
    let aut = automorphism_group(&b)?;
    let s0 = aut.point_stabilizer(0)?;
    let s1 = aut.point_stabilizer(n)?;
    if s0.order() != s1.order() {
        return Ok(false);
    }
    for g in s0.gens() {
        if !s1.contains(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Full classification: trivial instability reasons in order (disconnected,
/// bipartite with nontrivial automorphisms, reducible), then the order
/// criterion for connected non-bipartite irreducible graphs. Bipartite
/// graphs with trivial automorphism group are reported NotApplicable rather
/// than guessed either way.
pub fn classify(x: &Graph) -> Result<StabilityVerdict> {
    let (aut_x, aut_bx) = orders(x)?;
    if !x.is_connected() {
        return Ok(StabilityVerdict {
            status: Status::TriviallyUnstable,
            reason: Reason::Disconnected,
            aut_x_order: aut_x,
            aut_bx_order: aut_bx,
        });
    }
    if x.is_bipartite() {
        if aut_x > 1 {
            return Ok(StabilityVerdict {
                status: Status::TriviallyUnstable,
                reason: Reason::BipartiteWithNontrivialAut,
                aut_x_order: aut_x,
                aut_bx_order: aut_bx,
            });
        }
        return Ok(StabilityVerdict {
            status: Status::NotApplicable,
            reason: Reason::Bipartite,
            aut_x_order: aut_x,
            aut_bx_order: aut_bx,
        });
    }
    if !x.is_irreducible() {
        return Ok(StabilityVerdict {
            status: Status::TriviallyUnstable,
            reason: Reason::Reducible,
            aut_x_order: aut_x,
            aut_bx_order: aut_bx,
        });
    }
    is_stable_by_order(x)
}

/// All strongly switching involutions of a connected bipartite graph:
/// automorphisms γ with γ² = id that exchange the two colour classes and
/// map no edge to itself setwise. Enumerates Aut(y) up to
/// [`ELEMENT_ENUMERATION_CAP`] elements.
pub fn strongly_switching_involutions(y: &Graph) -> Result<Vec<Perm>> {
    if !y.is_connected() {
        return Err(Error::Applicability(
            "switching involutions need a connected graph (unique bipartition)".into(),
        ));
    }
    let bip = y.bipartition().ok_or_else(|| {
        Error::Applicability("switching involutions need a bipartite graph".into())
    })?;
    let class0 = &bip.blocks()[0];
    let mask0: u128 = class0.iter().fold(0, |m, &v| m | 1u128 << v);
    let aut = automorphism_group(y)?;
    let edges = y.edges();
    let mut out = Vec::new();
    for p in aut.elements(ELEMENT_ENUMERATION_CAP)? {
        if p.is_identity() || !p.compose_unchecked(&p).is_identity() {
            continue;
        }
        // swaps the colour classes
        if class0.iter().any(|&v| mask0 >> p.apply(v) & 1 == 1) {
            continue;
        }
        // fixes no edge setwise
        let fixes_edge = edges
            .iter()
            .any(|&(u, v)| p.apply(u) == v && p.apply(v) == u);
        if fixes_edge {
            continue;
        }
        debug_assert!(y.is_automorphism(&p));
        out.push(p);
    }
    out.sort();
    Ok(out)
}

/// Recognizes `y` as a canonical double cover: for every strongly switching
/// involution γ, pairs γ with the quotient of `y` by the orbits of ⟨γ⟩.
/// Each recovered graph X is verified to satisfy B(X) ≅ y.
pub fn recover_base_graphs(y: &Graph) -> Result<Vec<(Perm, Graph)>> {
    let involutions = strongly_switching_involutions(y)?;
    let n = y.vertex_count();
    let mut out = Vec::new();
    for gamma in involutions {
        let mut blocks = Vec::new();
        let mut seen = vec![false; n];
        for v in 0..n {
            if !seen[v] {
                let w = gamma.apply(v);
                seen[v] = true;
                seen[w] = true;
                blocks.push(vec![v, w]);
            }
        }
        let p = Partition::new(n, blocks)?;
        let x = quotient_graph(y, &p)?;
        let b = bipartite_double_cover(&x)?;
        if crate::graph::find_isomorphism(&b, y).is_none() {
            return Err(Error::Internal(format!(
                "quotient by switching involution {} is not a double-cover base",
                gamma
            )));
        }
        out.push((gamma, x));
    }
    Ok(out)
}

/// B(X) is reducible iff X is reducible; for graphs without isolated
/// vertices this always returns true and a false return signals an
/// implementation bug. An isolated vertex v sits outside the equivalence:
/// (v,0) and (v,1) share an empty neighbourhood in B(X), so B(K₁) is
/// reducible while K₁ is not.
pub fn worthiness_check(x: &Graph) -> Result<bool> {
    let b = bipartite_double_cover(x)?;
    Ok(x.is_irreducible() == b.is_irreducible())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{circulant, ConnectionSet};

    fn cs(n: usize, elems: &[usize]) -> ConnectionSet {
        ConnectionSet::new(n, elems.iter().copied()).unwrap()
    }

    fn circ(n: usize, elems: &[usize]) -> Graph {
        circulant(&cs(n, elems)).unwrap()
    }

    #[test]
    fn order_criterion_on_small_stable_graphs() {
        let v = is_stable_by_order(&Graph::cycle(5).unwrap()).unwrap();
        assert_eq!(v.status, Status::Stable);
        assert_eq!((v.aut_x_order, v.aut_bx_order), (10, 20));

        let v = is_stable_by_order(&Graph::complete(3).unwrap()).unwrap();
        assert_eq!(v.status, Status::Stable);
        assert_eq!((v.aut_x_order, v.aut_bx_order), (6, 12));
    }

    #[test]
    fn order_criterion_flags_reducible_k333() {
        let k333 = circ(9, &[1, 2, 4, 5, 7, 8]);
        let v = is_stable_by_order(&k333).unwrap();
        assert_eq!(v.status, Status::TriviallyUnstable);
        assert_eq!(v.reason, Reason::Reducible);
        // Aut(K₃,₃,₃) = S₃ wr S₃ and the cover gains more than the factor 2
        assert_eq!(v.aut_x_order, 1296);
        assert!(v.aut_bx_order > 2 * v.aut_x_order);
    }

    #[test]
    fn tau_centrality_criterion() {
        assert!(is_stable_by_tau_central(&Graph::cycle(5).unwrap()).unwrap());
        assert!(is_stable_by_tau_central(&circ(9, &[1, 8])).unwrap());
        let k333 = circ(9, &[1, 2, 4, 5, 7, 8]);
        assert!(!is_stable_by_tau_central(&k333).unwrap());
        // cross-check: exhibit a generator that does not commute with τ
        let b = bipartite_double_cover(&k333).unwrap();
        let aut = automorphism_group(&b).unwrap();
        let t = tau(9);
        assert!(aut.gens().iter().any(|g| !g.commutes_with(&t).unwrap()));
    }

    #[test]
    fn stabilizer_criterion() {
        assert!(is_stable_by_stabilizer(&Graph::cycle(5).unwrap()).unwrap());
        assert!(is_stable_by_stabilizer(&circ(9, &[1, 8])).unwrap());
        assert!(!is_stable_by_stabilizer(&circ(9, &[1, 2, 4, 5, 7, 8])).unwrap());
    }

    #[test]
    fn criteria_refuse_out_of_scope_inputs() {
        let bipartite = Graph::cycle(6).unwrap();
        assert!(matches!(
            is_stable_by_tau_central(&bipartite),
            Err(Error::Applicability(_))
        ));
        let disconnected = circ(6, &[2, 4]);
        assert!(matches!(
            is_stable_by_stabilizer(&disconnected),
            Err(Error::Applicability(_))
        ));
    }

    #[test]
    fn classification_reasons() {
        let v = classify(&circ(6, &[2, 4])).unwrap();
        assert_eq!(v.status, Status::TriviallyUnstable);
        assert_eq!(v.reason, Reason::Disconnected);

        let v = classify(&circ(4, &[1, 3])).unwrap();
        assert_eq!(v.status, Status::TriviallyUnstable);
        assert_eq!(v.reason, Reason::BipartiteWithNontrivialAut);

        let v = classify(&circ(6, &[1, 2, 4, 5])).unwrap();
        assert_eq!(v.status, Status::TriviallyUnstable);
        assert_eq!(v.reason, Reason::Reducible);

        let v = classify(&Graph::cycle(5).unwrap()).unwrap();
        assert_eq!(v.status, Status::Stable);
    }

    #[test]
    fn bipartite_with_trivial_group_is_not_applicable() {
        let t = Graph::from_edges(7, &[(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)]).unwrap();
        let v = classify(&t).unwrap();
        assert_eq!(v.status, Status::NotApplicable);
        assert_eq!(v.reason, Reason::Bipartite);
        assert_eq!(v.aut_x_order, 1);
    }

    #[test]
    fn switching_involutions_of_small_cycles() {
        let got = strongly_switching_involutions(&Graph::cycle(6).unwrap()).unwrap();
        assert_eq!(got, vec![Perm::translation(6, 3)]);

        let got = strongly_switching_involutions(&Graph::cycle(4).unwrap()).unwrap();
        assert!(got.is_empty());

        let two_edges = bipartite_double_cover(&Graph::complete(2).unwrap()).unwrap();
        assert!(matches!(
            strongly_switching_involutions(&two_edges),
            Err(Error::Applicability(_))
        ));
    }

    #[test]
    fn double_cover_recognition() {
        let got = recover_base_graphs(&Graph::cycle(6).unwrap()).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].0, Perm::translation(6, 3));
        assert_eq!(got[0].1, Graph::complete(3).unwrap());

        let got = recover_base_graphs(&Graph::cycle(10).unwrap()).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].0, Perm::translation(10, 5));
        assert!(crate::graph::find_isomorphism(&got[0].1, &Graph::cycle(5).unwrap()).is_some());

        assert!(recover_base_graphs(&Graph::cycle(4).unwrap())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn worthiness_examples() {
        assert!(worthiness_check(&Graph::cycle(5).unwrap()).unwrap());
        assert!(worthiness_check(&circ(6, &[1, 2, 4, 5])).unwrap());
        // the lone isolated vertex is the one degenerate case: K₁ is
        // irreducible but B(K₁) = K̄₂ duplicates the empty neighbourhood
        assert!(!worthiness_check(&Graph::complete(1).unwrap()).unwrap());
        assert!(worthiness_check(&Graph::complete(2).unwrap()).unwrap());
    }

    #[test]
    fn verdict_serialization_shape() {
        let v = StabilityVerdict {
            status: Status::Stable,
            reason: Reason::None,
            aut_x_order: 10,
            aut_bx_order: 20,
        };
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"status":"stable","reason":"none","autX":"10","autBX":"20"}"#
        );
    }
}
