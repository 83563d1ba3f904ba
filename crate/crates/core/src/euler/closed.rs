use crate::algebra::{rat, Cap, NilMonomial, TruncSeries};
use crate::error::{domain, Result};

/// The three families of `K(2)` framed generating series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum K2Kind {
    /// `(a, a+1)`: `(1 + x^a y^(a+1))^a`.
    Below,
    /// `(1, 1)`: `(1 - x y)^(-2)`.
    Diagonal,
    /// `(a+1, a)`: `(1 + x^(a+1) y^a)^(a+1)`.
    Above,
}

/// Closed-form generating series in `x` (source) and `y` (sink), truncated
/// to total degree `degree`, constant term included.
pub fn closed_form_k2(a: i64, kind: K2Kind, degree: i64) -> Result<TruncSeries> {
    if a < 1 {
        return domain(format!("closed form needs a >= 1, got {a}"));
    }
    let cap = Cap::degree(degree);
    let one = TruncSeries::one(2, cap.clone());
    let (exp, power) = match kind {
        K2Kind::Below => ([a, a + 1], a),
        K2Kind::Above => ([a + 1, a], a + 1),
        K2Kind::Diagonal => ([1, 1], -2),
    };
    let sign = if kind == K2Kind::Diagonal { -1 } else { 1 };
    let base = one.add(&TruncSeries::monomial(
        2,
        cap,
        &exp,
        NilMonomial::EMPTY,
        rat(sign),
    ))?;
    base.pow(power)
}
