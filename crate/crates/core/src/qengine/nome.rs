use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::hp::{HPReal, PrecisionContext, Rational};

/// q = exp(−π√r) for a positive parameter r.
///
/// `r` is usually an exact rational; values such as r = k_i(1/5) are
/// irrational, so a real-valued parameter is also accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct Nome {
    exact_r: Option<Rational>,
    r: Float,
    log_q: Float,
    q: Float,
    ctx: PrecisionContext,
}

/// Builds the nome for an exact rational r > 0.
pub fn make_nome(r: &Rational, ctx: PrecisionContext) -> Result<Nome> {
    Nome::new(r, ctx)
}

impl Nome {
    pub fn new(r: &Rational, ctx: PrecisionContext) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Domain(format!(
                "nome parameter r must be positive, got {r}"
            )));
        }
        let mut nome = Self::from_float(r.to_float(ctx.bits()), ctx)?;
        nome.exact_r = Some(r.clone());
        Ok(nome)
    }

    pub fn from_real(r: &HPReal) -> Result<Self> {
        Self::from_float(r.value().clone(), r.ctx())
    }

    fn from_float(r: Float, ctx: PrecisionContext) -> Result<Self> {
        let prec = ctx.bits();
        if r.cmp0() != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain("nome parameter r must be positive".into()));
        }
        let r = Float::with_val(prec, r);
        let log_q = -Float::with_val(prec, r.sqrt_ref()) * Float::with_val(prec, Constant::Pi);
        let q = Float::with_val(prec, log_q.exp_ref());
        Ok(Self {
            exact_r: None,
            r,
            log_q,
            q,
            ctx,
        })
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn prec(&self) -> u32 {
        self.ctx.bits()
    }

    pub fn exact_r(&self) -> Option<&Rational> {
        self.exact_r.as_ref()
    }

    pub fn r(&self) -> &Float {
        &self.r
    }

    pub fn q(&self) -> &Float {
        &self.q
    }

    pub fn q_real(&self) -> HPReal {
        HPReal::new(self.q.clone(), self.ctx).expect("nome is finite")
    }

    /// log q = −π√r.
    pub fn log_q(&self) -> &Float {
        &self.log_q
    }

    /// q^e on the principal positive branch.
    pub fn pow(&self, e: &Rational) -> Float {
        if e.is_zero() {
            return Float::with_val(self.prec(), 1);
        }
        Float::with_val(self.prec(), &self.log_q * e.to_float(self.prec())).exp()
    }

    pub fn pow_float(&self, e: &Float) -> Float {
        Float::with_val(self.prec(), &self.log_q * e).exp()
    }

    /// The nome of q^m, i.e. parameter m²·r.
    pub fn power(&self, m: &Rational) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::Domain(format!(
                "nome power must be positive, got {m}"
            )));
        }
        let m2 = m * m;
        let mut out = Self::from_float(
            Float::with_val(self.prec(), &self.r * m2.to_float(self.prec())),
            self.ctx,
        )?;
        out.exact_r = self.exact_r.as_ref().map(|r| r * &m2);
        Ok(out)
    }

    /// Same nome recomputed under another precision context.
    pub fn with_ctx(&self, ctx: PrecisionContext) -> Result<Self> {
        match &self.exact_r {
            Some(r) => Self::new(r, ctx),
            None => Self::from_float(Float::with_val(ctx.bits(), &self.r), ctx),
        }
    }

    /// Exponent E beyond which q^E < 10^-(digits+guard), with a small margin.
    pub fn max_exponent(&self) -> f64 {
        let digits = f64::from(self.ctx.truncation_exponent() + 2);
        digits * std::f64::consts::LN_10 / (-self.log_q.to_f64())
    }
}
