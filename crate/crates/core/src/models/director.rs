/// Unit vector `(cos φ, sin φ)` encoding an angle without a wrap discontinuity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Director(pub [f64; 2]);

impl Director {
    pub fn from_angle(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Director([c, s])
    }

    pub fn norm(&self) -> f64 {
        self.0[0].hypot(self.0[1])
    }

    pub fn angle(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }
}

pub fn director_encode(angles: &[f64]) -> Vec<Director> {
    angles.iter().map(|&phi| Director::from_angle(phi)).collect()
}
