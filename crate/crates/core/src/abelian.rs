//! Finite abelian diagonal groups: enumeration, basic generating systems,
//! and iterated (staged) Fujiki-Oka resolutions with crepancy verdicts.
//!
//! A basic generating system is a triangular list of age-1 rows
//! `g_i = 1/r_i(0,...,0,1,a_{i,i+1},...,a_{i,n})`; adjoining the rows from
//! the last coordinate block upward refines the lattice one stage at a
//! time, and every maximal cone of the previous stage stays
//! semi-unimodular, so each stage is resolved by ordinary Fujiki-Oka
//! blow-ups. The final fan is smooth with respect to the full group
//! lattice.

use num::rational::Ratio;
use num::One;

use crate::cf::{remainder_polynomial, MapValue, RemainderPolynomial, Word};
use crate::fan::{analyze_cone, fujiki_oka_resolve_capped, is_crepant, Cone, Fan, DEFAULT_MAX_CONES};
use crate::lattice::{GroupElement, LatticePoint, Overlattice, ProperFraction};
use crate::{Error, Result, Scalar};

/// A finite abelian group of diagonal actions, with its full element list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianGroup<T: Scalar> {
    rank: usize,
    generators: Vec<GroupElement<T>>,
    elements: Vec<GroupElement<T>>,
}

impl<T: Scalar> AbelianGroup<T> {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[GroupElement<T>] {
        &self.generators
    }

    /// All elements, sorted, identity included.
    pub fn elements(&self) -> &[GroupElement<T>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Every element has integer age.
    pub fn is_gorenstein(&self) -> bool {
        self.elements.iter().all(|g| g.is_gorenstein())
    }

    /// The overlattice `N_G = Z^n + sum g Z`.
    pub fn lattice(&self) -> Result<Overlattice<T>> {
        Overlattice::new(self.rank, self.generators.clone())
    }
}

/// Closes a generator list under composition.
pub fn enumerate_group<T: Scalar>(gens: &[GroupElement<T>]) -> Result<AbelianGroup<T>> {
    if gens.is_empty() {
        return Err(Error::EmptyVector);
    }
    let rank = gens[0].rank();
    for g in gens {
        if g.rank() != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                got: g.rank(),
            });
        }
    }
    let mut elements = std::collections::HashSet::new();
    let identity = GroupElement::identity(rank);
    elements.insert(identity.clone());
    let mut queue = vec![identity];
    while let Some(g) = queue.pop() {
        for h in gens {
            let s = g.compose(h)?;
            if elements.insert(s.clone()) {
                queue.push(s);
            }
        }
    }
    let mut elements: Vec<GroupElement<T>> = elements.into_iter().collect();
    elements.sort();
    Ok(AbelianGroup {
        rank,
        generators: gens.to_vec(),
        elements,
    })
}

/// Triangular age-1 generating system; `rows[i]` (0-based) is the row
/// supported on coordinates i..n, absent when the group has no component
/// there.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BasicGeneratingSystem<T: Scalar> {
    pub rows: Vec<Option<GroupElement<T>>>,
}

impl<T: Scalar> BasicGeneratingSystem<T> {
    pub fn present_rows(&self) -> Vec<GroupElement<T>> {
        self.rows.iter().flatten().cloned().collect()
    }
}

fn modular_inverse<T: Scalar>(a: &T, m: &T) -> Option<T> {
    // extended Euclid
    let (mut old_r, mut r) = (a.mod_floor(m), m.clone());
    let (mut old_s, mut s) = (T::one(), T::zero());
    while !r.is_zero() {
        let q = old_r.clone() / r.clone();
        let tmp_r = old_r - q.clone() * r.clone();
        old_r = std::mem::replace(&mut r, tmp_r);
        let tmp_s = old_s - q * s.clone();
        old_s = std::mem::replace(&mut s, tmp_s);
    }
    if old_r.is_one() {
        Some(old_s.mod_floor(m))
    } else {
        None
    }
}

/// Finds the triangular age-1 generating system of a Gorenstein group.
///
/// Row i is searched among the elements supported on coordinates i..n
/// whose order equals the order of their i-th coordinate; the power with
/// leading entry 1 must have age exactly 1. If some required row admits
/// no age-1 representative the search reports `NoAgeOneSystem` rather
/// than working around it.
pub fn basic_generating_system<T: Scalar>(
    group: &AbelianGroup<T>,
) -> Result<BasicGeneratingSystem<T>> {
    if !group.is_gorenstein() {
        return Err(Error::NonGorenstein);
    }
    let n = group.rank();
    let mut rows: Vec<Option<GroupElement<T>>> = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        // subgroup supported on coordinates i..n
        let tail: Vec<&GroupElement<T>> = group
            .elements()
            .iter()
            .filter(|g| g.numerators()[..i].iter().all(|a| a.is_zero()))
            .collect();
        // order of the projection to coordinate i
        let m = tail
            .iter()
            .map(|g| {
                let r = g.order().clone();
                let a = g.numerators()[i].clone();
                r.clone() / r.gcd(&a)
            })
            .max()
            .unwrap_or_else(T::one);
        if m.is_one() {
            rows.push(None);
            continue;
        }
        let mut best: Option<GroupElement<T>> = None;
        for g in &tail {
            if g.order() != &m {
                continue;
            }
            let lead = g.numerators()[i].clone();
            let Some(inv) = modular_inverse(&lead, &m) else {
                continue;
            };
            let candidate = g.pow(&inv);
            if candidate.age() != Ratio::one() {
                continue;
            }
            debug_assert!(candidate.numerators()[i].is_one());
            best = match best {
                Some(b) if b <= candidate => Some(b),
                _ => Some(candidate),
            };
        }
        match best {
            Some(row) => rows.push(Some(row)),
            None => return Err(Error::NoAgeOneSystem),
        }
    }
    let system = BasicGeneratingSystem { rows };
    // the rows must regenerate the group exactly
    let regenerated = enumerate_group(&{
        let mut gens = system.present_rows();
        if gens.is_empty() {
            gens.push(GroupElement::identity(n));
        }
        gens
    })?;
    if regenerated.elements() != group.elements() {
        return Err(Error::CrossCheck {
            what: "basic generating system does not regenerate the group".into(),
        });
    }
    Ok(system)
}

/// The embedding of a child stage lattice into the parent:
/// `phi_i(x) = x - x_i e_i + x_i f`, defined for an age-1 fraction `f`
/// and `x` in the child lattice `Z^n + R_i(f) Z`.
pub fn phi_embed<T: Scalar>(
    i: usize,
    f: &ProperFraction<T>,
    x: &LatticePoint<T>,
) -> Result<LatticePoint<T>> {
    if !f.is_normal_semi_unimodular() {
        return Err(Error::NotSemiUnimodular);
    }
    let n = f.rank();
    if i < 2 || i > n {
        return Err(Error::InvalidLetter { letter: i, rank: n });
    }
    if f.age() != Ratio::one() {
        return Err(Error::NonGorenstein);
    }
    if x.rank() != n {
        return Err(Error::RankMismatch {
            expected: n,
            got: x.rank(),
        });
    }
    let child = match crate::cf::remainder_map(i, f)? {
        MapValue::Finite(c) => c,
        MapValue::Infinity => {
            return Err(Error::InvalidLetter { letter: i, rank: n });
        }
    };
    let child_lattice = Overlattice::new(n, vec![child])?;
    if !child_lattice.contains(x) {
        return Err(Error::NotInLattice);
    }
    let xi = x.coords()[i - 1].clone();
    let mut e_i = LatticePoint::zero(n);
    let mut coords = e_i.coords().to_vec();
    coords[i - 1] = Ratio::one();
    e_i = LatticePoint::new(coords);
    Ok(x.sub(&e_i.scale(&xi)).add(&f.as_point().scale(&xi)))
}

/// One stage of an iterated resolution: the element adjoined, the refined
/// lattice, and the remainder polynomial of every cone resolved there.
#[derive(Clone, Debug)]
pub struct Stage<T: Scalar> {
    pub adjoined: GroupElement<T>,
    pub lattice: Overlattice<T>,
    /// (root type, polynomial) per cone that needed resolving.
    pub polynomials: Vec<(ProperFraction<T>, RemainderPolynomial<T>)>,
    pub cones_in: usize,
    pub cones_out: usize,
}

/// The subgroup chain and per-stage data of an iterated resolution.
#[derive(Clone, Debug)]
pub struct StageTranscript<T: Scalar> {
    pub stages: Vec<Stage<T>>,
}

impl<T: Scalar> StageTranscript<T> {
    /// First stage-polynomial coefficient (stage order, shortlex) whose
    /// age differs from 1.
    pub fn first_non_junior(&self) -> Option<(usize, Word, ProperFraction<T>)> {
        for (s, stage) in self.stages.iter().enumerate() {
            for (_, poly) in &stage.polynomials {
                if let Some((w, c)) = poly.first_non_junior() {
                    return Some((s, w.clone(), c.clone()));
                }
            }
        }
        None
    }
}

/// Iterated Fujiki-Oka resolution along the canonical chain: the rows of
/// the basic generating system are adjoined from the last coordinate
/// block upward.
pub fn iterated_fujiki_oka<T: Scalar>(
    group: &AbelianGroup<T>,
) -> Result<(Fan<T>, StageTranscript<T>)> {
    iterated_fujiki_oka_capped(group, DEFAULT_MAX_CONES)
}

pub fn iterated_fujiki_oka_capped<T: Scalar>(
    group: &AbelianGroup<T>,
    max_cones: usize,
) -> Result<(Fan<T>, StageTranscript<T>)> {
    let system = basic_generating_system(group)?;
    let chain: Vec<GroupElement<T>> = system.present_rows().into_iter().rev().collect();
    let (fan, transcript) = iterated_fujiki_oka_chain(group.rank(), &chain, max_cones)?;
    // the staged lattice must exhaust the full group lattice
    if fan.lattice != group.lattice()? {
        return Err(Error::CrossCheck {
            what: "stage chain does not generate the group lattice".into(),
        });
    }
    Ok((fan, transcript))
}

/// Iterated resolution along an explicit chain of adjoined elements;
/// stage s refines the lattice by `chain[s-1]` and resolves every maximal
/// cone that stopped being smooth. The apex for each cone is scanned
/// deterministically: the ray equal to the unit vector of the adjoined
/// element's leading slot first, then the remaining ray positions in
/// order. A cone with no valid apex aborts the construction.
pub fn iterated_fujiki_oka_chain<T: Scalar>(
    rank: usize,
    chain: &[GroupElement<T>],
    max_cones: usize,
) -> Result<(Fan<T>, StageTranscript<T>)> {
    let mut lattice = Overlattice::standard(rank);
    let mut cones = vec![Cone::orthant(rank)];
    let mut stages = Vec::with_capacity(chain.len());
    for g in chain {
        lattice = lattice.refine(g)?;
        let cones_in = cones.len();
        let preferred = g.numerators().iter().position(|a| !a.is_zero());
        let mut next: Vec<Cone<T>> = Vec::new();
        let mut polynomials = Vec::new();
        for cone in &cones {
            let det = lattice.cone_determinant(cone.rays())?;
            if det.is_one() {
                next.push(cone.clone());
                continue;
            }
            // apex scan: the stage's new coordinate first, then in order
            let unit = preferred.map(|k| LatticePoint::unit(rank, k));
            let mut order: Vec<usize> = Vec::with_capacity(rank);
            if let Some(u) = &unit {
                if let Some(pos) = cone.rays().iter().position(|r| r == u) {
                    order.push(pos);
                }
            }
            let rest: Vec<usize> = (0..rank).filter(|p| !order.contains(p)).collect();
            order.extend(rest);
            let mut resolved = None;
            for apex in order {
                if analyze_cone(cone, apex, &lattice).is_ok() {
                    resolved = Some(fujiki_oka_resolve_capped(
                        cone, apex, &lattice, max_cones,
                    )?);
                    break;
                }
            }
            let Some((sub_fan, sub_transcript)) = resolved else {
                return Err(Error::SemiUnimodularityLost {
                    cone: format!(
                        "[{}]",
                        cone.rays()
                            .iter()
                            .map(|r| r.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                });
            };
            let root_type = sub_transcript.nodes[0].fraction.clone();
            polynomials.push((root_type.clone(), remainder_polynomial(&root_type)?));
            next.extend(sub_fan.max_cones);
            if next.len() > max_cones {
                return Err(Error::ResourceCap { limit: max_cones });
            }
        }
        stages.push(Stage {
            adjoined: g.clone(),
            lattice: lattice.clone(),
            polynomials,
            cones_in,
            cones_out: next.len(),
        });
        cones = next;
    }
    Ok((
        Fan {
            lattice,
            max_cones: cones,
        },
        StageTranscript { stages },
    ))
}

/// Verdict of the staged crepancy criterion.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IteratedVerdict<T: Scalar> {
    /// Every stage coefficient has age 1; the assembled fan is crepant.
    Crepant,
    /// Some stage coefficient has age >= 2. The criterion is sufficient
    /// only, so this is *not determined*, not a proof of non-existence.
    NotDetermined {
        stage: usize,
        word: Word,
        coefficient: ProperFraction<T>,
    },
}

impl<T: Scalar> IteratedVerdict<T> {
    pub fn is_crepant(&self) -> bool {
        matches!(self, IteratedVerdict::Crepant)
    }
}

/// Decides crepancy of the iterated Fujiki-Oka resolution from the stage
/// remainder polynomials, cross-checking the assembled fan.
pub fn crepant_iterated<T: Scalar>(group: &AbelianGroup<T>) -> Result<IteratedVerdict<T>> {
    let (fan, transcript) = iterated_fujiki_oka(group)?;
    match transcript.first_non_junior() {
        None => {
            if !is_crepant(&fan, &fan.lattice.clone())? {
                return Err(Error::CrossCheck {
                    what: "all stage ages are 1 but the fan is not crepant".into(),
                });
            }
            Ok(IteratedVerdict::Crepant)
        }
        Some((stage, word, coefficient)) => Ok(IteratedVerdict::NotDetermined {
            stage,
            word,
            coefficient,
        }),
    }
}
