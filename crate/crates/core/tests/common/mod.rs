#![allow(dead_code)]

use qwalk::{Complex64, Distribution, Mat2, Topology};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn mad(a: &Distribution, b: &Distribution) -> f64 {
    qwalk::analysis::max_abs_diff(a, b).unwrap()
}

/// Dense square matrix, row-major. Used only as a slow reference.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense { n, a: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.a[j * n + i] = self.a[i * n + j].conj();
            }
        }
        out
    }

    pub fn add(&mut self, o: &Dense) {
        for (x, y) in self.a.iter_mut().zip(&o.a) {
            *x += y;
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|k| self.a[i * n + k] * v[k]).sum()).collect()
    }
}

/// `m ⊗ I_sites` with coin as the slow index.
pub fn coin_lift(m: &Mat2, sites: usize) -> Dense {
    let n = 2 * sites;
    let mut out = Dense::zeros(n);
    for r in 0..2 {
        for k in 0..2 {
            for i in 0..sites {
                out.a[(r * sites + i) * n + k * sites + i] = m.get(r, k);
            }
        }
    }
    out
}

/// Conditional shift written straight from its definition:
/// `|0,x⟩ → |0,x−1⟩`, `|1,x⟩ → |1,x+1⟩`, with the deltas swapped when
/// `inverted` is set.
pub fn shift_matrix(topo: Topology, inverted: bool) -> Dense {
    let sites = topo.site_count();
    let n = 2 * sites;
    let mut out = Dense::zeros(n);
    for coin in 0..2usize {
        let mut delta: i64 = if coin == 0 { -1 } else { 1 };
        if inverted {
            delta = -delta;
        }
        for i in 0..sites {
            let x = topo.label(i);
            let target = match topo {
                Topology::Line { half_width } => {
                    let y = x + delta;
                    if y.unsigned_abs() as usize > half_width {
                        continue;
                    }
                    y
                }
                Topology::Cycle { sites } => (x + delta).rem_euclid(sites as i64),
            };
            let j = topo.index(target).unwrap();
            out.a[(coin * sites + j) * n + coin * sites + i] = Complex64::new(1.0, 0.0);
        }
    }
    out
}

pub fn initial_vector(topo: Topology, coin: [Complex64; 2], x0: i64) -> Vec<Complex64> {
    let sites = topo.site_count();
    let mut v = vec![Complex64::new(0.0, 0.0); 2 * sites];
    let i = topo.index(x0).unwrap();
    v[i] = coin[0];
    v[sites + i] = coin[1];
    v
}

pub fn marginal_of_vector(topo: Topology, v: &[Complex64]) -> Vec<f64> {
    let sites = topo.site_count();
    (0..sites).map(|i| v[i].norm_sqr() + v[sites + i].norm_sqr()).collect()
}

pub fn marginal_of_density(topo: Topology, rho: &Dense) -> Vec<f64> {
    let sites = topo.site_count();
    let n = rho.n;
    (0..sites)
        .map(|i| rho.a[i * n + i].re + rho.a[(sites + i) * n + sites + i].re)
        .collect()
}

/// One reference step `G · S · (B ⊗ I)`.
pub fn step_matrix(topo: Topology, coin: &Mat2, inverted: bool, post: &[Mat2]) -> Dense {
    let sites = topo.site_count();
    let mut u = shift_matrix(topo, inverted).mul(&coin_lift(coin, sites));
    for g in post {
        u = coin_lift(g, sites).mul(&u);
    }
    u
}

/// `ρ → Σ_j (E_j ⊗ I) U ρ U† (E_j ⊗ I)†` iterated `steps` times.
pub fn dense_density_walk(
    topo: Topology,
    u: &Dense,
    kraus: &[Mat2],
    rho0: Dense,
    steps: usize,
) -> Dense {
    let sites = topo.site_count();
    let lifted: Vec<Dense> = kraus.iter().map(|e| coin_lift(e, sites)).collect();
    let mut rho = rho0;
    for _ in 0..steps {
        let r = u.mul(&rho).mul(&u.adjoint());
        let mut next = Dense::zeros(rho.n);
        for e in &lifted {
            next.add(&e.mul(&r).mul(&e.adjoint()));
        }
        rho = next;
    }
    rho
}

pub fn outer(v: &[Complex64]) -> Dense {
    let n = v.len();
    let mut m = Dense::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.a[i * n + j] = v[i] * v[j].conj();
        }
    }
    m
}
