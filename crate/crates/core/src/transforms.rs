//! Cached fast transforms: 2-D complex FFT for periodic grids, DST-I for
//! interior Dirichlet solves and DCT-I for the Neumann pressure Poisson
//! problem. Sine/cosine transforms are evaluated through odd/even extensions
//! of a complex FFT, so arbitrary lengths work.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Transpose a row-major nx-wide matrix into a row-major ny-wide one.
fn transpose<T: Copy + Default>(src: &[T], nx: usize, ny: usize, dst: &mut Vec<T>) {
    dst.clear();
    dst.resize(nx * ny, T::default());
    for j in 0..ny {
        for i in 0..nx {
            dst[i * ny + j] = src[j * nx + i];
        }
    }
}

/// Two-dimensional complex FFT over row-major (y-outer) data.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Plan,
    fwd_y: Plan,
    inv_x: Plan,
    inv_y: Plan,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        Fft2 {
            nx,
            ny,
            fwd_x: plan(nx, false),
            fwd_y: plan(ny, false),
            inv_x: plan(nx, true),
            inv_y: plan(ny, true),
        }
    }

    /// Forward transform of real samples; no normalization.
    pub fn forward(&self, real: &[f64]) -> Vec<Complex<f64>> {
        assert_eq!(real.len(), self.nx * self.ny);
        let mut buf: Vec<Complex<f64>> = real.iter().map(|&v| Complex::new(v, 0.0)).collect();
        for row in buf.chunks_exact_mut(self.nx) {
            self.fwd_x.process(row);
        }
        let mut t = Vec::new();
        transpose(&buf, self.nx, self.ny, &mut t);
        for col in t.chunks_exact_mut(self.ny) {
            self.fwd_y.process(col);
        }
        transpose(&t, self.ny, self.nx, &mut buf);
        buf
    }

    /// Inverse transform, normalized by 1/(nx*ny), real part returned.
    pub fn inverse_re(&self, mut spec: Vec<Complex<f64>>) -> Vec<f64> {
        assert_eq!(spec.len(), self.nx * self.ny);
        for row in spec.chunks_exact_mut(self.nx) {
            self.inv_x.process(row);
        }
        let mut t = Vec::new();
        transpose(&spec, self.nx, self.ny, &mut t);
        for col in t.chunks_exact_mut(self.ny) {
            self.inv_y.process(col);
        }
        transpose(&t, self.ny, self.nx, &mut spec);
        let scale = 1.0 / (self.nx * self.ny) as f64;
        spec.iter().map(|c| c.re * scale).collect()
    }
}

/// DST-I of length m (interior nodes of a Dirichlet line).
///
/// `apply` computes S_k = sum_j x_j sin(pi j k / (m+1)); applying it twice
/// and scaling by 2/(m+1) is the identity.
pub struct Dst1 {
    m: usize,
    fft: Plan,
    scratch: Mutex<Vec<Complex<f64>>>,
}

impl Dst1 {
    pub fn new(m: usize) -> Self {
        let len = 2 * (m + 1);
        Dst1 {
            m,
            fft: plan(len, false),
            scratch: Mutex::new(vec![Complex::default(); len]),
        }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.m);
        assert_eq!(out.len(), self.m);
        let len = 2 * (self.m + 1);
        let mut buf = self.scratch.lock().expect("dst scratch poisoned");
        buf.fill(Complex::default());
        for j in 0..self.m {
            buf[j + 1] = Complex::new(x[j], 0.0);
            buf[len - 1 - j] = Complex::new(-x[j], 0.0);
        }
        self.fft.process(&mut buf);
        for k in 0..self.m {
            out[k] = -0.5 * buf[k + 1].im;
        }
    }

    /// Normalization so that apply(apply(x)) * norm() == x.
    pub fn norm(&self) -> f64 {
        2.0 / (self.m + 1) as f64
    }
}

/// DCT-I of length n (all nodes of a Neumann line, endpoints included).
///
/// `apply` computes C_k = sum_j w_j x_j cos(pi j k/(n-1)) with half weights
/// at the endpoints; applying it twice and scaling by 2/(n-1) is the identity.
pub struct Dct1 {
    n: usize,
    fft: Plan,
    scratch: Mutex<Vec<Complex<f64>>>,
}

impl Dct1 {
    pub fn new(n: usize) -> Self {
        let len = 2 * (n - 1);
        Dct1 {
            n,
            fft: plan(len, false),
            scratch: Mutex::new(vec![Complex::default(); len]),
        }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        let len = 2 * (self.n - 1);
        let mut buf = self.scratch.lock().expect("dct scratch poisoned");
        buf.fill(Complex::default());
        for j in 0..self.n {
            buf[j] = Complex::new(x[j], 0.0);
        }
        for j in 1..self.n - 1 {
            buf[len - j] = Complex::new(x[j], 0.0);
        }
        self.fft.process(&mut buf);
        for k in 0..self.n {
            out[k] = 0.5 * buf[k].re;
        }
    }

    pub fn norm(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }
}

/// Tensorized application of a 1-D transform along both axes of a row-major
/// (y-outer) nx-by-ny array. `tx` acts on x-lines, `ty` on y-lines.
pub fn apply_2d(
    tx: &dyn Fn(&[f64], &mut [f64]),
    ty: &dyn Fn(&[f64], &mut [f64]),
    nx: usize,
    ny: usize,
    data: &[f64],
) -> Vec<f64> {
    assert_eq!(data.len(), nx * ny);
    let mut stage = vec![0.0; nx * ny];
    for j in 0..ny {
        let (src, dst) = (&data[j * nx..(j + 1) * nx], &mut stage[j * nx..(j + 1) * nx]);
        tx(src, dst);
    }
    let mut t = Vec::new();
    transpose(&stage, nx, ny, &mut t);
    let mut out_t = vec![0.0; nx * ny];
    for i in 0..nx {
        let (src, dst) = (&t[i * ny..(i + 1) * ny], &mut out_t[i * ny..(i + 1) * ny]);
        ty(src, dst);
    }
    let mut out = Vec::new();
    transpose(&out_t, ny, nx, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dst1_matches_naive_and_roundtrips() {
        let m = 7;
        let dst = Dst1::new(m);
        let x: Vec<f64> = (0..m).map(|j| (j as f64 * 0.7 + 0.3).sin()).collect();
        let mut s = vec![0.0; m];
        dst.apply(&x, &mut s);
        for k in 1..=m {
            let naive: f64 = (1..=m)
                .map(|j| x[j - 1] * (PI * (j * k) as f64 / (m + 1) as f64).sin())
                .sum();
            assert!((s[k - 1] - naive).abs() < 1e-12, "k={k}");
        }
        let mut back = vec![0.0; m];
        dst.apply(&s, &mut back);
        for j in 0..m {
            assert!((back[j] * dst.norm() - x[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn dct1_matches_naive_and_roundtrips() {
        let n = 9;
        let dct = Dct1::new(n);
        let x: Vec<f64> = (0..n).map(|j| (j as f64 * 0.31 - 0.8).cos()).collect();
        let mut c = vec![0.0; n];
        dct.apply(&x, &mut c);
        for k in 0..n {
            let naive: f64 = (0..n)
                .map(|j| {
                    let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                    w * x[j] * (PI * (j * k) as f64 / (n - 1) as f64).cos()
                })
                .sum();
            assert!((c[k] - naive).abs() < 1e-12, "k={k}");
        }
        let mut back = vec![0.0; n];
        dct.apply(&c, &mut back);
        for j in 0..n {
            assert!((back[j] * dct.norm() - x[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn fft2_roundtrip() {
        let (nx, ny) = (12, 10);
        let fft = Fft2::new(nx, ny);
        let data: Vec<f64> = (0..nx * ny).map(|i| ((i * 37 % 101) as f64).sin()).collect();
        let spec = fft.forward(&data);
        let back = fft.inverse_re(spec);
        for (a, b) in data.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
