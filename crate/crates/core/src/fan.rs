//! Cones, Oka centers, the Fujiki-Oka resolution (continued fraction fan),
//! discrepancies, crepancy of explicit fans, and the resolution verifier.
//!
//! The singularity type of a cone over an apex is computed from the cone
//! itself by an integer linear solve for the Oka center, independently of
//! the remainder-map combinatorics; the agreement of the two routes is
//! what the oracle module cross-checks.

use std::collections::{HashMap, HashSet};

use num::rational::Ratio;
use num::{One, Signed, Zero};

use crate::cf::Word;
use crate::lattice::{LatticePoint, Overlattice, ProperFraction};
use crate::linalg;
use crate::{Error, Result, Scalar};

/// Default cap on the number of transcript nodes of a single resolution.
pub const DEFAULT_MAX_CONES: usize = 100_000;

/// A simplicial cone given by its ordered primitive ray generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cone<T: Scalar> {
    rays: Vec<LatticePoint<T>>,
}

impl<T: Scalar> Cone<T> {
    pub fn new(rays: Vec<LatticePoint<T>>) -> Self {
        Self { rays }
    }

    /// The positive orthant spanned by the unit vectors.
    pub fn orthant(rank: usize) -> Self {
        Self::new((0..rank).map(|i| LatticePoint::unit(rank, i)).collect())
    }

    pub fn rays(&self) -> &[LatticePoint<T>] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.rays.len()
    }
}

/// A fan of maximal cones over a stated lattice.
#[derive(Clone, Debug)]
pub struct Fan<T: Scalar> {
    pub lattice: Overlattice<T>,
    pub max_cones: Vec<Cone<T>>,
}

impl<T: Scalar> Fan<T> {
    /// The distinct rays of the fan, sorted.
    pub fn rays(&self) -> Vec<LatticePoint<T>> {
        let mut set: Vec<LatticePoint<T>> = self
            .max_cones
            .iter()
            .flat_map(|c| c.rays().iter().cloned())
            .collect();
        set.sort();
        set.dedup();
        set
    }
}

/// Singularity data of a semi-unimodular cone over an apex.
#[derive(Clone, Debug)]
pub struct ConeAnalysis<T: Scalar> {
    pub determinant: T,
    /// `1/r(1, a_2, ..., a_n)` with slot 1 at the apex and the remaining
    /// slots following the ray order of the cone.
    pub fraction: ProperFraction<T>,
    /// The Oka center, absent for smooth cones.
    pub center: Option<LatticePoint<T>>,
}

/// Computes determinant, proper fraction and Oka center of a cone that is
/// semi-unimodular over the ray at position `apex`.
pub fn analyze_cone<T: Scalar>(
    cone: &Cone<T>,
    apex: usize,
    lattice: &Overlattice<T>,
) -> Result<ConeAnalysis<T>> {
    let n = lattice.rank();
    if cone.dim() != n || apex >= n {
        return Err(Error::RankMismatch {
            expected: n,
            got: cone.dim(),
        });
    }
    let coords: Vec<Vec<T>> = cone
        .rays()
        .iter()
        .map(|p| lattice.coords(p).ok_or(Error::NotInLattice))
        .collect::<Result<_>>()?;
    let m: Vec<Vec<T>> = (0..n)
        .map(|i| coords.iter().map(|c| c[i].clone()).collect())
        .collect();
    let det = linalg::det(&m).abs();
    if det.is_zero() {
        return Err(Error::DependentRays);
    }
    // the facet opposite the apex must be smooth
    let facet: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != apex)
                .map(|j| coords[j][i].clone())
                .collect()
        })
        .collect();
    if !linalg::gcd_max_minors(&facet, n - 1).is_one() {
        return Err(Error::FacetNotSmooth);
    }
    if det.is_one() {
        return Ok(ConeAnalysis {
            determinant: det,
            fraction: ProperFraction::identity(n),
            center: None,
        });
    }
    // Solve P_apex + sum a_j P_j = det * c over the integers, unknowns
    // (a_j for j != apex, c_1..c_n).
    let others: Vec<usize> = (0..n).filter(|&j| j != apex).collect();
    let cols = (n - 1) + n;
    let mut a = vec![vec![T::zero(); cols]; n];
    for (k, &j) in others.iter().enumerate() {
        for (i, row) in a.iter_mut().enumerate() {
            row[k] = coords[j][i].clone();
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[n - 1 + i] = -det.clone();
    }
    let b: Vec<T> = (0..n).map(|i| -coords[apex][i].clone()).collect();
    let sol = linalg::solve_diophantine(&a, &b).ok_or(Error::NoOkaCenter)?;
    let weights: Vec<T> = sol[..n - 1].iter().map(|w| w.mod_floor(&det)).collect();
    // center coordinates, recomputed from the reduced weights
    let mut center_coords = coords[apex].clone();
    for (k, &j) in others.iter().enumerate() {
        for i in 0..n {
            center_coords[i] =
                center_coords[i].clone() + weights[k].clone() * coords[j][i].clone();
        }
    }
    let mut c = Vec::with_capacity(n);
    for v in center_coords {
        let (q, rem) = v.div_rem(&det);
        if !rem.is_zero() {
            return Err(Error::NoOkaCenter);
        }
        c.push(q);
    }
    let mut g = T::zero();
    for ci in &c {
        g = g.gcd(ci);
    }
    if !g.is_one() {
        return Err(Error::NoOkaCenter);
    }
    let mut nums = Vec::with_capacity(n);
    nums.push(T::one());
    nums.extend(weights);
    Ok(ConeAnalysis {
        determinant: det.clone(),
        fraction: ProperFraction::new(nums, det)?,
        center: Some(lattice.from_coords(&c)),
    })
}

/// The quotient-singularity type of the cone over the apex.
pub fn singularity_type<T: Scalar>(
    cone: &Cone<T>,
    apex: usize,
    lattice: &Overlattice<T>,
) -> Result<ProperFraction<T>> {
    Ok(analyze_cone(cone, apex, lattice)?.fraction)
}

/// The Oka center `C = (P_apex + sum a_i P_i) / r`, the blow-up center of
/// one Fujiki-Oka step. Smooth cones have none.
pub fn oka_center<T: Scalar>(
    cone: &Cone<T>,
    apex: usize,
    lattice: &Overlattice<T>,
) -> Result<LatticePoint<T>> {
    analyze_cone(cone, apex, lattice)?
        .center
        .ok_or(Error::SmoothCone)
}

/// One node of a resolution transcript.
#[derive(Clone, Debug)]
pub struct TranscriptNode<T: Scalar> {
    /// Path from the root; letters 2..=n select the replaced slot of the
    /// singularity type, letter 1 is the smooth apex-replacement child.
    pub word: Word,
    pub cone: Cone<T>,
    /// Ray position of the apex within `cone`.
    pub apex: usize,
    pub fraction: ProperFraction<T>,
    pub center: Option<LatticePoint<T>>,
    /// `(slot letter, node index)` pairs, sorted by letter.
    pub children: Vec<(usize, usize)>,
}

/// The full blow-up tree of a Fujiki-Oka resolution. Node 0 is the root;
/// leaves are the smooth maximal cones of the fan.
#[derive(Clone, Debug)]
pub struct ResolutionTranscript<T: Scalar> {
    pub nodes: Vec<TranscriptNode<T>>,
}

impl<T: Scalar> ResolutionTranscript<T> {
    /// (word, fraction) of every singular node, i.e. the geometric side of
    /// the remainder polynomial.
    pub fn singular_types(&self) -> Vec<(Word, ProperFraction<T>)> {
        let mut out: Vec<(Word, ProperFraction<T>)> = self
            .nodes
            .iter()
            .filter(|n| !n.fraction.is_identity())
            .map(|n| (n.word.clone(), n.fraction.clone()))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

/// Resolves a semi-unimodular cone by repeated blow-ups at Oka centers,
/// producing the continued fraction fan and its transcript.
pub fn fujiki_oka_resolve<T: Scalar>(
    cone: &Cone<T>,
    apex: usize,
    lattice: &Overlattice<T>,
) -> Result<(Fan<T>, ResolutionTranscript<T>)> {
    fujiki_oka_resolve_capped(cone, apex, lattice, DEFAULT_MAX_CONES)
}

pub fn fujiki_oka_resolve_capped<T: Scalar>(
    cone: &Cone<T>,
    apex: usize,
    lattice: &Overlattice<T>,
    max_cones: usize,
) -> Result<(Fan<T>, ResolutionTranscript<T>)> {
    let n = lattice.rank();
    let mut nodes: Vec<TranscriptNode<T>> = Vec::new();
    let mut fan_cones: Vec<Cone<T>> = Vec::new();
    // (cone, word, parent (node, letter))
    let mut stack: Vec<(Cone<T>, Word, Option<(usize, usize)>)> =
        vec![(cone.clone(), Word::empty(), None)];
    while let Some((c, w, parent)) = stack.pop() {
        if nodes.len() >= max_cones {
            return Err(Error::ResourceCap { limit: max_cones });
        }
        let analysis = analyze_cone(&c, apex, lattice)?;
        let id = nodes.len();
        nodes.push(TranscriptNode {
            word: w.clone(),
            cone: c.clone(),
            apex,
            fraction: analysis.fraction.clone(),
            center: analysis.center.clone(),
            children: Vec::new(),
        });
        if let Some((pid, letter)) = parent {
            nodes[pid].children.push((letter, id));
        }
        match analysis.center {
            None => fan_cones.push(c),
            Some(center) => {
                // star subdivision: replace each ray whose weight in the
                // center is nonzero (slot 1 is the apex, weight 1)
                let others: Vec<usize> = (0..n).filter(|&j| j != apex).collect();
                for slot in (1..=n).rev() {
                    let (pos, weight_zero) = if slot == 1 {
                        (apex, false)
                    } else {
                        (
                            others[slot - 2],
                            analysis.fraction.numerators()[slot - 1].is_zero(),
                        )
                    };
                    if weight_zero {
                        continue;
                    }
                    let mut rays = c.rays().to_vec();
                    rays[pos] = center.clone();
                    stack.push((Cone::new(rays), w.extended(slot), Some((id, slot))));
                }
            }
        }
    }
    for node in nodes.iter_mut() {
        node.children.sort();
    }
    Ok((
        Fan {
            lattice: lattice.clone(),
            max_cones: fan_cones,
        },
        ResolutionTranscript { nodes },
    ))
}

/// Discrepancy (age minus one) of every exceptional ray of a fan
/// subdividing the positive orthant. Unit rays are not exceptional and
/// are excluded.
pub fn fan_discrepancies<T: Scalar>(
    fan: &Fan<T>,
    lattice: &Overlattice<T>,
) -> Result<Vec<(LatticePoint<T>, Ratio<T>)>> {
    let n = lattice.rank();
    let units: HashSet<LatticePoint<T>> = (0..n).map(|i| LatticePoint::unit(n, i)).collect();
    let mut out = Vec::new();
    for ray in fan.rays() {
        if units.contains(&ray) {
            continue;
        }
        if !lattice.is_primitive(&ray)? {
            return Err(Error::NonPrimitiveRay);
        }
        let d = ray.age() - Ratio::one();
        out.push((ray, d));
    }
    Ok(out)
}

/// A fan all of whose maximal cones are smooth is crepant iff every
/// exceptional ray has age exactly 1.
pub fn is_crepant<T: Scalar>(fan: &Fan<T>, lattice: &Overlattice<T>) -> Result<bool> {
    for c in &fan.max_cones {
        if !lattice.cone_determinant(c.rays())?.is_one() {
            return Err(Error::NotAResolution);
        }
    }
    Ok(fan_discrepancies(fan, lattice)?
        .iter()
        .all(|(_, d)| d.is_zero()))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VerificationFailure {
    RayNotInLattice { cone: usize },
    NonSmoothCone { cone: usize, determinant: String },
    VolumeMismatch { total: String, expected: String },
    DuplicateCone { first: usize, second: usize },
    FaceViolation { first: usize, second: usize },
    RayOutsideRoot { ray: String },
    DegenerateCone { cone: usize },
    DegenerateRoot,
}

/// Outcome of the four-part resolution audit.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VerificationReport {
    pub failures: Vec<VerificationFailure>,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Audits a purported resolution fan of `root`:
/// 1. every maximal cone is smooth,
/// 2. cone determinants sum to the determinant of the root (volume
///    partition),
/// 3. every pairwise intersection of maximal cones is a common face,
/// 4. every ray lies in the root cone.
///
/// The face check runs on the transversal slice (rays normalized to
/// coordinate sum 1), where maximal cones become geometric simplices;
/// all comparisons are exact rational arithmetic.
pub fn verify_resolution<T: Scalar>(
    fan: &Fan<T>,
    lattice: &Overlattice<T>,
    root: &Cone<T>,
) -> VerificationReport {
    let n = lattice.rank();
    let mut failures = Vec::new();

    // (1) smoothness and lattice membership
    let mut dets: Vec<Option<T>> = Vec::with_capacity(fan.max_cones.len());
    for (i, c) in fan.max_cones.iter().enumerate() {
        match lattice.cone_determinant(c.rays()) {
            Ok(d) => {
                if !d.is_one() {
                    failures.push(VerificationFailure::NonSmoothCone {
                        cone: i,
                        determinant: d.to_string(),
                    });
                }
                dets.push(Some(d));
            }
            Err(Error::NotInLattice) => {
                failures.push(VerificationFailure::RayNotInLattice { cone: i });
                dets.push(None);
            }
            Err(_) => {
                failures.push(VerificationFailure::DegenerateCone { cone: i });
                dets.push(None);
            }
        }
    }

    // (2) volume partition on the transversal slice. Comparing raw
    // lattice determinants would only be valid when every ray has age 1:
    // generator simplices of rays off the age-1 hyperplane overshoot the
    // slice (the minimal resolution of 1/3(1,1) has two smooth cones over
    // an index-3 lattice). Normalizing each determinant by the ray ages
    // measures the slice simplices themselves, which always partition.
    let slice_volume = |c: &Cone<T>, d: &T| -> Option<Ratio<T>> {
        let mut v = Ratio::new(d.clone(), lattice.index().clone());
        for ray in c.rays() {
            let age = ray.age();
            if !age.is_positive() {
                return None;
            }
            v = v / age;
        }
        Some(v)
    };
    match lattice.cone_determinant(root.rays()) {
        Ok(root_det) => {
            let expected = slice_volume(root, &root_det);
            let mut total = Some(Ratio::zero());
            for (i, d) in dets.iter().enumerate() {
                total = match (total, d) {
                    (Some(acc), Some(d)) => {
                        slice_volume(&fan.max_cones[i], d).map(|v| acc + v)
                    }
                    _ => None,
                };
            }
            match (total, expected) {
                (Some(total), Some(expected)) => {
                    if total != expected {
                        failures.push(VerificationFailure::VolumeMismatch {
                            total: total.to_string(),
                            expected: expected.to_string(),
                        });
                    }
                }
                (_, None) => failures.push(VerificationFailure::DegenerateRoot),
                // some cone already reported unusable; partition not decidable
                (None, _) => {}
            }
        }
        Err(_) => failures.push(VerificationFailure::DegenerateRoot),
    }

    // (4) rays inside the root cone
    let root_matrix: Vec<Vec<Ratio<T>>> = (0..n)
        .map(|i| {
            root.rays()
                .iter()
                .map(|v| v.coords()[i].clone())
                .collect::<Vec<_>>()
        })
        .collect();
    for ray in fan.rays() {
        match linalg::solve_unique(&root_matrix, ray.coords()) {
            Some(lambda) if lambda.iter().all(|l| !l.is_negative()) => {}
            _ => failures.push(VerificationFailure::RayOutsideRoot {
                ray: ray.to_string(),
            }),
        }
    }

    // (3) pairwise intersections are common faces
    faces_check(fan, n, &mut failures);

    VerificationReport { failures }
}

/// Normalized vertex data of a maximal cone on the slice `sum x_i = 1`.
struct Slice<T: Scalar> {
    verts: Vec<usize>, // indices into the vertex pool
    lo: Vec<Ratio<T>>, // bounding box
    hi: Vec<Ratio<T>>,
}

fn faces_check<T: Scalar>(fan: &Fan<T>, n: usize, failures: &mut Vec<VerificationFailure>) {
    let mut pool: Vec<Vec<Ratio<T>>> = Vec::new();
    let mut pool_index: HashMap<Vec<Ratio<T>>, usize> = HashMap::new();
    let mut slices: Vec<Option<Slice<T>>> = Vec::new();

    for c in &fan.max_cones {
        if c.dim() != n {
            slices.push(None);
            continue;
        }
        let mut verts = Vec::with_capacity(n);
        let mut ok = true;
        for ray in c.rays() {
            let s = ray.age();
            if !s.is_positive() {
                ok = false;
                break;
            }
            let v: Vec<Ratio<T>> = ray.coords().iter().map(|x| x.clone() / s.clone()).collect();
            let id = *pool_index.entry(v.clone()).or_insert_with(|| {
                pool.push(v.clone());
                pool.len() - 1
            });
            verts.push(id);
        }
        if !ok {
            slices.push(None);
            continue;
        }
        let lo: Vec<Ratio<T>> = (0..n)
            .map(|i| verts.iter().map(|&v| pool[v][i].clone()).min().unwrap())
            .collect();
        let hi: Vec<Ratio<T>> = (0..n)
            .map(|i| verts.iter().map(|&v| pool[v][i].clone()).max().unwrap())
            .collect();
        slices.push(Some(Slice { verts, lo, hi }));
    }

    // inverse of the matrix whose columns are the normalized vertices;
    // its rows are the barycentric functionals of the simplex
    let invert = |verts: &[usize], pool: &[Vec<Ratio<T>>]| -> Option<Vec<Vec<Ratio<T>>>> {
        let a: Vec<Vec<Ratio<T>>> = (0..n)
            .map(|i| verts.iter().map(|&v| pool[v][i].clone()).collect())
            .collect();
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = vec![Ratio::zero(); n];
            e[k] = Ratio::one();
            cols.push(linalg::solve_unique(&a, &e)?);
        }
        Some(
            (0..n)
                .map(|j| (0..n).map(|k| cols[k][j].clone()).collect())
                .collect(),
        )
    };

    let count = fan.max_cones.len();
    for i in 0..count {
        for j in i + 1..count {
            let (Some(si), Some(sj)) = (&slices[i], &slices[j]) else {
                continue;
            };
            if (0..n).any(|k| si.hi[k] < sj.lo[k] || sj.hi[k] < si.lo[k]) {
                continue; // disjoint boxes: the cones meet at the origin only
            }
            let common: Vec<usize> = si
                .verts
                .iter()
                .filter(|v| sj.verts.contains(v))
                .cloned()
                .collect();
            if common.len() == n {
                failures.push(VerificationFailure::DuplicateCone {
                    first: i,
                    second: j,
                });
                continue;
            }
            if common.len() == n - 1 {
                // shared facet: the two opposite vertices must lie strictly
                // on opposite sides of its hyperplane
                let rows: Vec<Vec<Ratio<T>>> = common.iter().map(|&v| pool[v].clone()).collect();
                let Some(u) = linalg::kernel_vector(&rows) else {
                    failures.push(VerificationFailure::FaceViolation {
                        first: i,
                        second: j,
                    });
                    continue;
                };
                let opp = |s: &Slice<T>| {
                    s.verts
                        .iter()
                        .find(|v| !common.contains(v))
                        .cloned()
                        .unwrap()
                };
                let dot = |v: usize| -> Ratio<T> {
                    pool[v]
                        .iter()
                        .zip(u.iter())
                        .fold(Ratio::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
                };
                let s = dot(opp(si));
                let t = dot(opp(sj));
                if s.is_zero() || t.is_zero() || s.is_positive() == t.is_positive() {
                    failures.push(VerificationFailure::FaceViolation {
                        first: i,
                        second: j,
                    });
                }
                continue;
            }
            // general case: enumerate the vertices of the intersection and
            // require each to lie in the convex hull of the common vertices
            let Some(inv_i) = invert(&si.verts, &pool) else {
                failures.push(VerificationFailure::DegenerateCone { cone: i });
                continue;
            };
            let Some(inv_j) = invert(&sj.verts, &pool) else {
                failures.push(VerificationFailure::DegenerateCone { cone: j });
                continue;
            };
            let mut constraints = inv_i;
            constraints.extend(inv_j);
            if !intersection_inside_hull(&constraints, n, &common, &pool) {
                failures.push(VerificationFailure::FaceViolation {
                    first: i,
                    second: j,
                });
            }
        }
    }
}

/// Enumerates the vertices of `{x : C x >= 0, sum x = 1}` by brute force
/// over constraint subsets and checks that each lies in the hull of the
/// given pool points.
fn intersection_inside_hull<T: Scalar>(
    constraints: &[Vec<Ratio<T>>],
    n: usize,
    hull: &[usize],
    pool: &[Vec<Ratio<T>>],
) -> bool {
    let m = constraints.len();
    let k = n - 1; // active constraints at a vertex, besides the sum row
    let mut vertices: HashSet<Vec<Ratio<T>>> = HashSet::new();
    if k <= m {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            // solve: chosen constraints vanish, coordinates sum to 1
            let mut a: Vec<Vec<Ratio<T>>> = idx.iter().map(|&r| constraints[r].clone()).collect();
            a.push(vec![Ratio::one(); n]);
            let mut b = vec![Ratio::zero(); k];
            b.push(Ratio::one());
            if let Some(x) = linalg::solve_unique(&a, &b) {
                let feasible = constraints.iter().all(|row| {
                    !row.iter()
                        .zip(x.iter())
                        .fold(Ratio::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
                        .is_negative()
                });
                if feasible {
                    vertices.insert(x);
                }
            }
            // next (n-1)-subset of the constraint rows
            let mut i = k;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if idx[i] != i + m - k {
                    idx[i] += 1;
                    for j in i + 1..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    let hull_matrix: Vec<Vec<Ratio<T>>> = (0..n)
        .map(|c| hull.iter().map(|&v| pool[v][c].clone()).collect())
        .collect();
    vertices.iter().all(|x| {
        if hull.is_empty() {
            return false;
        }
        match linalg::solve_unique(&hull_matrix, x) {
            Some(lambda) => lambda.iter().all(|l| !l.is_negative()),
            None => false,
        }
    })
}
