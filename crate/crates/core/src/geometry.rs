//! Tilted-frame geometry between the source aperture and the panel.
//!
//! The z-axis runs from the aperture centre to the panel centre. Heights
//! above the (flat) ground are never obtained by rotating coordinates; they
//! follow from the straight-line height profile along each ray.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioGeometry<T> {
    /// Centre-to-centre distance source → panel [m].
    pub distance: T,
    /// Height of the aperture centre above ground [m].
    pub source_height: T,
    /// Height of the panel centre above ground [m].
    pub panel_height: T,
    /// Panel extent along x [m].
    pub panel_length: T,
    /// Panel extent along y [m].
    pub panel_width: T,
}

impl<T: Real> ScenarioGeometry<T> {
    pub fn new(distance: T, source_height: T, panel_height: T, panel_length: T, panel_width: T) -> Result<Self> {
        let g = Self {
            distance,
            source_height,
            panel_height,
            panel_length,
            panel_width,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("distance", self.distance),
            ("source height", self.source_height),
            ("panel height", self.panel_height),
            ("panel length", self.panel_length),
            ("panel width", self.panel_width),
        ];
        for (name, v) in checks {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidGeometry(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Inclination of the optical axis, see [`tilt_angle`].
    pub fn tilt(&self) -> T {
        ((self.panel_height - self.source_height) / self.distance).atan()
    }

    /// Height above ground of a point in the aperture plane.
    #[inline]
    pub fn source_point_height(&self, y0: T, cos_tilt: T) -> T {
        y0 * cos_tilt + self.source_height
    }

    /// Height above ground of a point in the panel plane.
    #[inline]
    pub fn panel_point_height(&self, y: T, cos_tilt: T) -> T {
        y * cos_tilt + self.panel_height
    }
}

/// A point in the tilted frame. Aperture points sit at `z = 0`, panel points
/// at `z = distance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> PathPoint<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn on_aperture(x0: T, y0: T) -> Self {
        Self::new(x0, y0, T::zero())
    }
}

/// Horizontal inclination `atan((hp - h0) / D)`; negative when the panel is
/// lower than the source.
pub fn tilt_angle<T: Real>(source_height: T, panel_height: T, distance: T) -> Result<T> {
    if !(distance > T::zero()) {
        return Err(Error::InvalidGeometry(format!("distance must be positive, got {distance}")));
    }
    Ok(((panel_height - source_height) / distance).atan())
}

pub fn separation<T: Real>(src: &PathPoint<T>, dst: &PathPoint<T>) -> T {
    let dx = dst.x - src.x;
    let dy = dst.y - src.y;
    let dz = dst.z - src.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Endpoint heights `(h(0), h(R))` of the straight ray `src → dst`.
pub fn endpoint_heights<T: Real>(src: &PathPoint<T>, dst: &PathPoint<T>, geom: &ScenarioGeometry<T>) -> (T, T) {
    let c = geom.tilt().cos();
    (geom.source_point_height(src.y, c), geom.panel_point_height(dst.y, c))
}

/// Height above ground after travelling `arclength` metres from `src`
/// towards `dst`. The profile is linear in the arclength.
pub fn path_height<T: Real>(
    src: &PathPoint<T>,
    dst: &PathPoint<T>,
    geom: &ScenarioGeometry<T>,
    arclength: T,
) -> Result<T> {
    let r = separation(src, dst);
    let (h_src, h_dst) = endpoint_heights(src, dst, geom);
    if r == T::zero() {
        if arclength > T::zero() {
            return Err(Error::InvalidArgument(
                "arclength must be zero on a zero-length path".into(),
            ));
        }
        return Ok(h_src);
    }
    if arclength < T::zero() || arclength > r {
        return Err(Error::InvalidArgument(format!(
            "arclength {arclength} outside [0, {r}]"
        )));
    }
    Ok((h_dst - h_src) / r * arclength + h_src)
}

/// Lowest point of the ray above ground (an endpoint, since the profile is linear).
pub fn min_path_height<T: Real>(src: &PathPoint<T>, dst: &PathPoint<T>, geom: &ScenarioGeometry<T>) -> T {
    let (a, b) = endpoint_heights(src, dst, geom);
    a.min(b)
}
