//! Clustered-spectrum bounds: center assignment, the cluster polynomial and
//! its first-order estimate.

use serde::{Deserialize, Serialize};

use super::decompose::{weighted_norm, EigenData};
use crate::linalg::{norm2, Matrix};
use crate::precision::{Complex, DoubleDouble, ExtendedComplex, Real, Scalar};
use crate::{Error, Result};

/// How centers are chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterMode<T> {
    /// Single-linkage grouping: members closer than `2ε` share a cluster.
    Radius(f64),
    /// Greedy k-center with this many centers.
    Count(usize),
    /// Fixed centers; each eigenvalue goes to the nearest one.
    Centers(Vec<Complex<T>>),
}

/// `λ_i = γ_{j(i)} + ε_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterAssignment<T: Real> {
    pub lambdas: Vec<Complex<T>>,
    pub centers: Vec<Complex<T>>,
    pub offsets: Vec<Complex<T>>,
    pub center_of: Vec<usize>,
    /// `max_i |ε_i|`.
    pub epsilon: T,
}

fn arg<T: Real>(z: Complex<T>) -> f64 {
    z.im.to_f64().atan2(z.re.to_f64())
}

fn cmp_f64(a: f64, b: f64) -> std::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
}

/// Indices ordered by descending modulus, then ascending argument.
fn modulus_order<T: Real>(lambdas: &[Complex<T>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..lambdas.len()).collect();
    idx.sort_by(|&a, &b| {
        lambdas[b]
            .modulus()
            .partial_cmp(&lambdas[a].modulus())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(cmp_f64(arg(lambdas[a]), arg(lambdas[b])))
            .then(a.cmp(&b))
    });
    idx
}

fn mean<T: Real>(zs: impl Iterator<Item = Complex<T>>) -> Complex<T> {
    let mut sum = Complex::<T>::zero();
    let mut count = 0usize;
    for z in zs {
        sum += z;
        count += 1;
    }
    sum.scale(T::one() / T::from_usize(count.max(1)))
}

fn nearest<T: Real>(z: Complex<T>, centers: &[Complex<T>]) -> usize {
    let mut best = 0;
    let mut best_d = (z - centers[0]).modulus();
    for (j, &c) in centers.iter().enumerate().skip(1) {
        let d = (z - c).modulus();
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

impl<T: Real> ClusterAssignment<T> {
    fn from_parts(lambdas: &[Complex<T>], centers: Vec<Complex<T>>, center_of: Vec<usize>) -> Result<Self> {
        for (j, c) in centers.iter().enumerate() {
            if c.is_zero() {
                return Err(Error::InvalidArgument(format!("cluster center {} is zero", j + 1)));
            }
            if centers[..j].contains(c) {
                return Err(Error::InvalidArgument(format!("cluster center {} is repeated", j + 1)));
            }
        }
        let offsets: Vec<Complex<T>> = lambdas
            .iter()
            .zip(&center_of)
            .map(|(&l, &j)| l - centers[j])
            .collect();
        let epsilon = offsets.iter().fold(T::zero(), |m, e| m.max(e.modulus()));
        Ok(Self {
            lambdas: lambdas.to_vec(),
            centers,
            offsets,
            center_of,
            epsilon,
        })
    }

    /// Number of centers `s`.
    pub fn s(&self) -> usize {
        self.centers.len()
    }

    pub fn members(&self, j: usize) -> Vec<usize> {
        (0..self.lambdas.len()).filter(|&i| self.center_of[i] == j).collect()
    }

    /// Eigenvalue indices by descending `|ε_i|`; ties by argument, then index.
    pub fn by_descending_offset(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.lambdas.len()).collect();
        idx.sort_by(|&a, &b| {
            self.offsets[b]
                .modulus()
                .partial_cmp(&self.offsets[a].modulus())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(cmp_f64(arg(self.lambdas[a]), arg(self.lambdas[b])))
                .then(a.cmp(&b))
        });
        idx
    }

    /// Roots of the cluster polynomial of degree `k`: the first `k` centers
    /// when `k ≤ s`, otherwise every center plus the `k − s` eigenvalues of
    /// largest offset. Returns the roots and the indices of the eigenvalues
    /// used as exact roots.
    pub fn roots(&self, k: usize) -> Result<(Vec<Complex<T>>, Vec<usize>)> {
        let s = self.s();
        if k <= s {
            return Ok((self.centers[..k].to_vec(), Vec::new()));
        }
        let extra = k - s;
        if extra > self.lambdas.len() {
            return Err(Error::InvalidArgument(format!(
                "degree {k} needs {extra} eigenvalue roots but only {} eigenvalues exist",
                self.lambdas.len()
            )));
        }
        let exact: Vec<usize> = self.by_descending_offset()[..extra].to_vec();
        let mut roots = self.centers.clone();
        roots.extend(exact.iter().map(|&i| self.lambdas[i]));
        Ok((roots, exact))
    }
}

/// Groups nonzero eigenvalues around centers.
pub fn cluster_assign<T: Real>(lambdas: &[Complex<T>], mode: &ClusterMode<T>) -> Result<ClusterAssignment<T>> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("no eigenvalues to cluster".into()));
    }
    if lambdas.iter().any(|z| z.is_zero()) {
        return Err(Error::InvalidArgument("zero eigenvalue cannot be clustered".into()));
    }
    let order = modulus_order(lambdas);
    match mode {
        ClusterMode::Radius(eps) => {
            if !(*eps >= 0.0) {
                return Err(Error::InvalidArgument(format!("cluster radius must be nonnegative, got {eps}")));
            }
            let reach = T::from_f64(2.0 * eps);
            let n = lambdas.len();
            let mut group = vec![usize::MAX; n];
            let mut centers = Vec::new();
            for &seed in &order {
                if group[seed] != usize::MAX {
                    continue;
                }
                let g = centers.len();
                group[seed] = g;
                let mut members = vec![seed];
                let mut at = 0;
                while at < members.len() {
                    let z = lambdas[members[at]];
                    for &o in &order {
                        if group[o] == usize::MAX && (lambdas[o] - z).modulus() <= reach {
                            group[o] = g;
                            members.push(o);
                        }
                    }
                    at += 1;
                }
                centers.push(mean(members.iter().map(|&i| lambdas[i])));
            }
            ClusterAssignment::from_parts(lambdas, centers, group)
        }
        ClusterMode::Count(s) => {
            let mut distinct: Vec<Complex<T>> = Vec::new();
            for &i in &order {
                if !distinct.contains(&lambdas[i]) {
                    distinct.push(lambdas[i]);
                }
            }
            if *s == 0 || *s > distinct.len() {
                return Err(Error::InvalidArgument(format!(
                    "requested {s} centers but there are {} distinct eigenvalues",
                    distinct.len()
                )));
            }
            let mut chosen = vec![distinct[0]];
            while chosen.len() < *s {
                let mut best = distinct[0];
                let mut best_d = -T::one();
                for &z in &distinct {
                    let d = (z - chosen[nearest(z, &chosen)]).modulus();
                    if d > best_d {
                        best_d = d;
                        best = z;
                    }
                }
                chosen.push(best);
            }
            let center_of: Vec<usize> = lambdas.iter().map(|&z| nearest(z, &chosen)).collect();
            let centers: Vec<Complex<T>> = (0..*s)
                .map(|j| mean((0..lambdas.len()).filter(|&i| center_of[i] == j).map(|i| lambdas[i])))
                .collect();
            ClusterAssignment::from_parts(lambdas, centers, center_of)
        }
        ClusterMode::Centers(centers) => {
            if centers.is_empty() {
                return Err(Error::InvalidArgument("no centers given".into()));
            }
            let center_of = lambdas.iter().map(|&z| nearest(z, centers)).collect();
            ClusterAssignment::from_parts(lambdas, centers.clone(), center_of)
        }
    }
}

fn check_matches<T: Real>(e: &EigenData<T>, ca: &ClusterAssignment<T>) -> Result<()> {
    if e.lambdas != ca.lambdas {
        return Err(Error::InvalidArgument(
            "cluster assignment was built for different eigenvalues".into(),
        ));
    }
    Ok(())
}

/// `(−1)^(k−1) ∏_r (γ − r) / ∏_r r` in extended precision.
fn poly_at(gamma: ExtendedComplex, roots: &[ExtendedComplex]) -> ExtendedComplex {
    let mut p = ExtendedComplex::one();
    for &r in roots {
        p *= (gamma - r) / r;
    }
    if roots.len() % 2 == 0 {
        -p
    } else {
        p
    }
}

/// `‖V_d diag(c)‖₂ · ‖(f(λ_i))_i‖₂` for the cluster polynomial `f` of
/// degree `k`, evaluated in product form.
pub fn cluster_poly_bound<T: Real>(e: &EigenData<T>, ca: &ClusterAssignment<T>, k: usize) -> Result<DoubleDouble> {
    check_matches(e, ca)?;
    if k == 0 {
        return Err(Error::InvalidArgument("polynomial degree must be at least 1".into()));
    }
    let (roots, exact) = ca.roots(k)?;
    let roots: Vec<ExtendedComplex> = roots.iter().map(|z| z.to_extended()).collect();
    let values: Vec<ExtendedComplex> = (0..e.d())
        .map(|i| {
            if exact.contains(&i) {
                ExtendedComplex::zero()
            } else {
                poly_at(e.lambdas[i].to_extended(), &roots)
            }
        })
        .collect();
    Ok(weighted_norm(e).to_extended() * norm2(&values))
}

/// First-order (in `ε`) estimate of [`cluster_poly_bound`].
///
/// With a single center at 1 this is `ε_k √(d−k+1) ∏_{i<k} |1−λ_i|/|λ_i|`
/// over the eigenvalues numbered by descending `|ε_i|`. Otherwise it is
/// `ε_k ‖V_d diag(c)‖₂ ‖(f′(γ_{j(i)}))_i‖₂` over the eigenvalues with nonzero
/// offset that are not exact roots, which needs `k ≥ s`.
pub fn first_order_estimate<T: Real>(e: &EigenData<T>, ca: &ClusterAssignment<T>, k: usize) -> Result<DoubleDouble> {
    check_matches(e, ca)?;
    let d = e.d();
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!("k must lie in 1..={d}, got {k}")));
    }
    let order = ca.by_descending_offset();
    let s = ca.s();
    let one = Complex::<T>::one();
    if s == 1 && ca.centers[0] == one {
        let eps_k = ca.offsets[order[k - 1]].modulus().to_extended();
        let mut prod = DoubleDouble::ONE;
        for &i in &order[..k - 1] {
            let lam = e.lambdas[i].to_extended();
            prod *= (ExtendedComplex::one() - lam).modulus() / lam.modulus();
        }
        let root = DoubleDouble::from((d - k + 1) as f64).sqrt_unchecked();
        return Ok(eps_k * root * prod);
    }
    if k < s {
        return Err(Error::Inapplicable(format!(
            "first-order estimate needs k >= s ({k} < {s})"
        )));
    }
    let (roots, exact) = ca.roots(k)?;
    let roots: Vec<ExtendedComplex> = roots.iter().map(|z| z.to_extended()).collect();
    let eps_k = order
        .get(k - s)
        .map_or(DoubleDouble::ZERO, |&i| ca.offsets[i].modulus().to_extended());
    let scale = roots.iter().fold(ExtendedComplex::one(), |p, &r| p * r);
    let sign = if k % 2 == 1 { DoubleDouble::ONE } else { -DoubleDouble::ONE };
    let derivs: Vec<ExtendedComplex> = (0..d)
        .filter(|&i| !exact.contains(&i) && !ca.offsets[i].is_zero())
        .map(|i| {
            let j = ca.center_of[i];
            let g = roots[j];
            let mut p = ExtendedComplex::one();
            for (t, &r) in roots.iter().enumerate() {
                if t != j {
                    p *= g - r;
                }
            }
            (p / scale).scale(sign)
        })
        .collect();
    Ok(eps_k * weighted_norm(e).to_extended() * norm2(&derivs))
}

/// `Λ_s` with rows `(γ_{j(i)}^p)_{p=1..k}` and the first-order perturbation
/// `P` with rows `(p γ_{j(i)}^(p−1) ε_i)_{p=1..k}`, so that `Λ_ε ≈ Λ_s + P`.
pub fn perturbation_split<T: Real>(
    ca: &ClusterAssignment<T>,
    k: usize,
) -> (Matrix<Complex<T>>, Matrix<Complex<T>>) {
    let d = ca.lambdas.len();
    let mut ls = Matrix::zeros(d, k);
    let mut p = Matrix::zeros(d, k);
    for i in 0..d {
        let g = ca.centers[ca.center_of[i]];
        let eps = ca.offsets[i];
        let mut gp_prev = Complex::<T>::one();
        for q in 0..k {
            ls[(i, q)] = gp_prev * g;
            p[(i, q)] = gp_prev * eps.scale(T::from_usize(q + 1));
            gp_prev *= g;
        }
    }
    (ls, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn data(lambdas: Vec<Complex<f64>>) -> EigenData<f64> {
        let d = lambdas.len();
        EigenData {
            vectors: Matrix::identity(d),
            weights: vec![c(1.0, 0.0); d],
            unexplained_residual: 0.0,
            r0_norm: (d as f64).sqrt(),
            lambdas,
        }
    }

    #[test]
    fn identical_eigenvalues_one_center() {
        let l = vec![c(2.0, 0.0); 4];
        let ca = cluster_assign(&l, &ClusterMode::Radius(1e-6)).unwrap();
        assert_eq!(ca.s(), 1);
        assert!(ca.offsets.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn radius_groups_near_values() {
        let l = vec![
            c(1.0 + 1e-9, 0.0),
            c(1.0 - 2e-7, 0.0),
            c(1.0, 1e-8),
            c(0.9999, 0.0),
            c(0.5, 0.0),
        ];
        let ca = cluster_assign(&l, &ClusterMode::Radius(1e-6)).unwrap();
        assert_eq!(ca.s(), 3);
        assert_eq!(ca.members(ca.center_of[0]), vec![0, 1, 2]);
        assert!(ca.epsilon < 2e-6);
    }

    #[test]
    fn k_center_recovers_clouds() {
        let mut l = Vec::new();
        for &(g, r) in &[(1.0, 0.01), (3.0, 0.02)] {
            l.push(c(g + r, 0.0));
            l.push(c(g, r));
            l.push(c(g - r, -r));
        }
        let ca = cluster_assign(&l, &ClusterMode::Count(2)).unwrap();
        let mut cs: Vec<f64> = ca.centers.iter().map(|z| z.re).collect();
        cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((cs[0] - 1.0).abs() < 0.01 && (cs[1] - 3.0).abs() < 0.02);
        assert!(cluster_assign(&l, &ClusterMode::Count(7)).is_err());
    }

    #[test]
    fn zero_center_rejected() {
        let l = vec![c(1.0, 0.0)];
        assert!(cluster_assign(&l, &ClusterMode::Centers(vec![c(0.0, 0.0)])).is_err());
    }

    #[test]
    fn degree_one_single_cluster_is_offset_norm() {
        let l: Vec<_> = (1..=4).map(|i| c(1.0 + 1e-3 * i as f64, 0.0)).collect();
        let e = data(l.clone());
        let ca = cluster_assign(&l, &ClusterMode::Centers(vec![c(1.0, 0.0)])).unwrap();
        let b = cluster_poly_bound(&e, &ca, 1).unwrap().to_f64();
        let want = (1..=4).map(|i| (1e-3 * i as f64).powi(2)).sum::<f64>().sqrt();
        assert!((b - want).abs() < 1e-15);
    }

    #[test]
    fn all_eigenvalues_as_roots_give_zero() {
        let l = vec![c(1.0, 0.0), c(1.1, 0.0), c(0.5, 0.0)];
        let e = data(l.clone());
        let ca = cluster_assign(&l, &ClusterMode::Centers(vec![c(1.0, 0.0)])).unwrap();
        assert_eq!(cluster_poly_bound(&e, &ca, 3).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn lemma_two_closed_form() {
        let l: Vec<_> = (1..=5).map(|i| c(1.0 + 1e-8 * i as f64, 0.0)).collect();
        let e = data(l.clone());
        let ca = cluster_assign(&l, &ClusterMode::Centers(vec![c(1.0, 0.0)])).unwrap();
        let est = first_order_estimate(&e, &ca, 2).unwrap().to_f64();
        let l1 = 1.0 + 5e-8;
        let want = 4e-8 * 2.0 * (l1 - 1.0) / l1;
        assert!((est - want).abs() <= 1e-6 * want);
        let full = cluster_poly_bound(&e, &ca, 2).unwrap().to_f64();
        assert!(full <= est * 1.01);
    }

    #[test]
    fn estimate_is_linear_in_offsets() {
        let centers = vec![c(1.0, 0.0), c(0.5, 0.0)];
        let offs = [1e-7, -2e-7, 3e-8, 5e-8];
        let build = |t: f64| {
            let l: Vec<_> = offs
                .iter()
                .enumerate()
                .map(|(i, &o)| c(if i < 2 { 1.0 } else { 0.5 } + t * o, 0.0))
                .collect();
            let e = data(l.clone());
            let ca = cluster_assign(&l, &ClusterMode::Centers(centers.clone())).unwrap();
            first_order_estimate(&e, &ca, 2).unwrap().to_f64()
        };
        let full = build(1.0);
        assert!((build(0.5) / full - 0.5).abs() < 1e-8);
        let exact = vec![c(1.0, 0.0), c(0.5, 0.0)];
        let e = data(exact.clone());
        let ca = cluster_assign(&exact, &ClusterMode::Centers(centers.clone())).unwrap();
        assert_eq!(first_order_estimate(&e, &ca, 2).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn singleton_centers_do_not_enter_estimate() {
        // Cluster at 1 with offsets ±ε plus two isolated eigenvalues.
        let eps = 1e-10;
        let l = vec![c(1.0 + eps, 0.0), c(1.0 - eps, 0.0), c(0.5, 0.0), c(0.25, 0.0)];
        let e = data(l.clone());
        let ca = cluster_assign(&l, &ClusterMode::Radius(2e-10)).unwrap();
        assert_eq!(ca.s(), 3);
        let est = first_order_estimate(&e, &ca, 3).unwrap().to_f64();
        // f′(1) = (1 − 0.5)(1 − 0.25) / (1 · 0.5 · 0.25).
        let fp = 0.5 * 0.75 / 0.125;
        let want = eps * 1.0 * (2.0f64).sqrt() * fp;
        assert!((est - want).abs() <= 1e-6 * want, "{est:e} vs {want:e}");
        let full = cluster_poly_bound(&e, &ca, 3).unwrap().to_f64();
        assert!((full - want).abs() <= 1e-6 * want);
    }

    #[test]
    fn perturbation_split_is_first_order() {
        let l = vec![c(1.0 + 1e-5, 0.0), c(0.9 - 2e-5, 1e-5)];
        let ca = cluster_assign(&l, &ClusterMode::Centers(vec![c(1.0, 0.0), c(0.9, 0.0)])).unwrap();
        let k = 4;
        let (ls, p) = perturbation_split(&ca, k);
        let exact = Matrix::from_fn(2, k, |i, q| l[i].powi(q as u32 + 1));
        let rem = exact.sub(&ls.add(&p)).max_abs();
        let eps = ca.epsilon;
        assert!(rem <= (k * k) as f64 * eps * eps, "{rem:e}");
    }
}
