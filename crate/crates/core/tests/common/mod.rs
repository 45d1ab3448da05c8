#![allow(dead_code)]

use qent_core::tensor::{CMatrix, Ket, C64};

pub fn ket_from(parts: &[f64]) -> Option<Ket> {
    let amps: Vec<C64> = parts.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-3 {
        return None;
    }
    Ket::new(amps).ok()
}

/// `e^{iδ} [[cos a, −e^{iλ} sin a], [e^{iφ} sin a, e^{i(φ+λ)} cos a]]`.
pub fn qubit_unitary(a: f64, phi: f64, lambda: f64, delta: f64) -> CMatrix {
    let g = C64::from_polar(1.0, delta);
    let (s, c) = a.sin_cos();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            g * c,
            -g * C64::from_polar(s, lambda),
            g * C64::from_polar(s, phi),
            g * C64::from_polar(c, phi + lambda),
        ],
    )
}

pub fn apply(u: &CMatrix, k: &Ket) -> Ket {
    Ket::from_vector(u * k.vector()).unwrap()
}

pub fn local(us: [&CMatrix; 3]) -> CMatrix {
    us[0].kronecker(us[1]).kronecker(us[2])
}
