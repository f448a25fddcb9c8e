// temporary probe: root accuracy of companion eigenvalues
use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn companion(monic: &[f64]) -> DMatrix<f64> {
    let d = monic.len();
    let mut c = DMatrix::<f64>::zeros(d, d);
    for i in 1..d { c[(i, i-1)] = 1.0; }
    for i in 0..d { c[(i, d-1)] = -monic[d-1-i]; }
    c
}

fn poly_eval(coeffs: &[f64], z: Complex<f64>) -> Complex<f64> {
    // coeffs: x0..xd for x0 z^d + ... + xd
    let mut acc = Complex::new(0.0, 0.0);
    for &c in coeffs {
        acc = acc * z + Complex::new(c, 0.0);
    }
    acc
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let x: Vec<f64> = (0..64).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    let monic: Vec<f64> = x[1..].iter().map(|&c| c / x[0]).collect();
    let c = companion(&monic);
    let eig = c.complex_eigenvalues();
    // residual of monic poly at roots
    let mut full = vec![1.0];
    full.extend_from_slice(&monic);
    let mut worst: f64 = 0.0;
    for z in eig.iter() {
        let r = poly_eval(&full, *z).norm();
        // scale by derivative magnitude for conditioning-free error? just print raw
        worst = worst.max(r);
    }
    println!("max |p(root)| residual (no balance): {worst:.3e}");
    // rebuild coefficients
    let mut coeffs = vec![Complex::new(1.0, 0.0)];
    for r in eig.iter() {
        coeffs.push(Complex::new(0.0, 0.0));
        for i in (1..coeffs.len()).rev() {
            let prev = coeffs[i-1];
            coeffs[i] = coeffs[i] - r * prev;
        }
    }
    let mut recon_err: f64 = 0.0;
    for (i, &c) in coeffs.iter().enumerate() {
        let orig = if i == 0 { 1.0 } else { monic[i-1] };
        recon_err = recon_err.max((c - Complex::new(orig, 0.0)).norm());
    }
    println!("reconstruction max err (no balance): {recon_err:.3e}");
    // magnitudes of roots
    let mut mags: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    mags.sort_by(f64::total_cmp);
    println!("root magnitudes: min {:.3} max {:.3}", mags[0], mags[mags.len()-1]);
}
