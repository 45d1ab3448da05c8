use nalgebra::Matrix3;

/// `6√6`: product of the row norms of `M`, each equal to `√6`.
pub const HADAMARD_BOUND: f64 = 14.696938456699067;

/// Both expressions for the Shifts-span overlap of a real product state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    /// The sum of four trigonometric products.
    pub trig_sum: f64,
    /// `1 − det(M)/16`.
    pub via_determinant: f64,
}

impl ClosedForm {
    pub fn value(&self) -> f64 {
        self.trig_sum
    }
}

/// `⟨a b c|P̃|a b c⟩` for zero-phase factors `cos(x/2)|0⟩ + sin(x/2)|1⟩`,
/// with `P̃` the projector onto the Shifts UPB.
pub fn f_closed_form(alpha: f64, beta: f64, gamma: f64) -> ClosedForm {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    let trig_sum = ((1.0 + ca) * (1.0 + cb) * (1.0 + cg)
        + (1.0 - ca) * (1.0 + sb) * (1.0 - sg)
        + (1.0 - sa) * (1.0 - cb) * (1.0 + sg)
        + (1.0 + sa) * (1.0 - sb) * (1.0 - cg))
        / 8.0;
    let via_determinant = 1.0 - det_m(alpha, beta, gamma) / 16.0;
    debug_assert!(
        (trig_sum - via_determinant).abs() < 1e-12,
        "trigonometric and determinant forms disagree: {trig_sum} vs {via_determinant}"
    );
    ClosedForm {
        trig_sum,
        via_determinant,
    }
}

pub fn m_matrix(alpha: f64, beta: f64, gamma: f64) -> Matrix3<f64> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    Matrix3::new(
        ca - sa, ca + sa, -2.0, //
        cb + sb, -2.0, cb - sb, //
        -2.0, cg - sg, cg + sg,
    )
}

pub fn det_m(alpha: f64, beta: f64, gamma: f64) -> f64 {
    m_matrix(alpha, beta, gamma).determinant()
}
