//! Linear membership functions and membership degrees.

use core::fmt;

use crate::Error;

/// A membership degree in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct Degree(f64);

impl Degree {
    pub const ZERO: Degree = Degree(0.0);
    pub const ONE: Degree = Degree(1.0);

    pub fn new(value: f64) -> Result<Self, Error> {
        if (0.0..=1.0).contains(&value) {
            Ok(Degree(value))
        } else {
            Err(Error::DegreeOutOfRange { value })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    // Callers guarantee the range; the clamp only absorbs rounding.
    #[inline]
    pub(crate) fn saturating(value: f64) -> Self {
        Degree(value.clamp(0.0, 1.0))
    }
}

impl TryFrom<f64> for Degree {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self, Error> {
        Degree::new(value)
    }
}

impl From<Degree> for f64 {
    fn from(d: Degree) -> f64 {
        d.0
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Direction of a linear membership function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Shape {
    /// 1 at and below `x_min`, 0 at and above `x_max`.
    Falling,
    /// 0 at and below `x_min`, 1 at and above `x_max`.
    Rising,
}

/// A linear falling or rising membership function over `[x_min, x_max]`.
///
/// Outside the interval the function saturates. At the endpoints it takes the
/// value of the interior segment's limit, so evaluation is total and
/// continuous.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawMembership"))]
pub struct MembershipFunction {
    shape: Shape,
    x_min: f64,
    x_max: f64,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMembership {
    shape: Shape,
    x_min: f64,
    x_max: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<RawMembership> for MembershipFunction {
    type Error = Error;

    fn try_from(raw: RawMembership) -> Result<Self, Error> {
        MembershipFunction::new(raw.shape, raw.x_min, raw.x_max)
    }
}

impl MembershipFunction {
    pub fn new(shape: Shape, x_min: f64, x_max: f64) -> Result<Self, Error> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidMembership { x_min, x_max });
        }
        Ok(MembershipFunction { shape, x_min, x_max })
    }

    pub fn falling(x_min: f64, x_max: f64) -> Result<Self, Error> {
        Self::new(Shape::Falling, x_min, x_max)
    }

    pub fn rising(x_min: f64, x_max: f64) -> Result<Self, Error> {
        Self::new(Shape::Rising, x_min, x_max)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Degree of membership of `x`.
    pub fn evaluate(&self, x: f64) -> Result<Degree, Error> {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput { value: x });
        }
        let width = self.x_max - self.x_min;
        let value = match self.shape {
            Shape::Falling if x <= self.x_min => 1.0,
            Shape::Falling if x >= self.x_max => 0.0,
            Shape::Falling => (self.x_max - x) / width,
            Shape::Rising if x <= self.x_min => 0.0,
            Shape::Rising if x >= self.x_max => 1.0,
            Shape::Rising => (x - self.x_min) / width,
        };
        Ok(Degree::saturating(value))
    }

    /// The point in `[x_min, x_max]` whose membership is `alpha`.
    ///
    /// `alpha = 0` and `alpha = 1` map to the endpoints even though the
    /// forward function is flat beyond them.
    pub fn invert(&self, alpha: Degree) -> f64 {
        let a = alpha.value();
        let width = self.x_max - self.x_min;
        match self.shape {
            Shape::Rising if a == 1.0 => self.x_max,
            Shape::Rising => (self.x_min + a * width).min(self.x_max),
            Shape::Falling if a == 1.0 => self.x_min,
            Shape::Falling => (self.x_max - a * width).max(self.x_min),
        }
    }

    /// Like [`invert`](Self::invert) but takes a raw value and checks its range.
    pub fn invert_value(&self, alpha: f64) -> Result<f64, Error> {
        Degree::new(alpha).map(|a| self.invert(a))
    }
}
