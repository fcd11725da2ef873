//! Scenarios compiled into the binary, so `list` and `run <name>` work
//! from any directory.

use crate::catalogue::closest;

pub struct Shipped {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! shipped {
    ($($name:literal),* $(,)?) => {
        &[$(Shipped { name: $name, text: include_str!(concat!("../scenarios/", $name, ".toml")) }),*]
    };
}

pub const SHIPPED: &[Shipped] = shipped![
    "hemisphere_double",
    "kappa_half",
    "kappa_two",
    "flat_double",
    "cylinder_double",
    "generic_warped_pair",
    "cap_on_cylinder",
    "mildly_negative_double",
    "torus_sc_k",
];

pub fn find(name: &str) -> Option<&'static Shipped> {
    let stem = name.strip_suffix(".toml").unwrap_or(name);
    SHIPPED.iter().find(|s| s.name == stem)
}

pub fn suggestion(name: &str) -> Option<&'static str> {
    closest(name, SHIPPED.iter().map(|s| s.name))
}
