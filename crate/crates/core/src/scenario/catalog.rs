//! Builtin scenarios. `sphere_latitude` and `great_circle` have closed-form
//! solutions and exist to check the solver, not to reproduce an experiment.

use super::config::{parse_config, ScenarioConfig};
use super::ScenarioError;

const TORUS_KNOT_2_3: &str = r#"
name = "torus_knot_2_3"
formulation = "embedded"

[surface]
name = "torus"
tube_radius = 1.0
center_radius = 4.0

[initial_curve]
type = "torus_knot"
k = 2
l = 3

[solver]
nodes = 200
t_end = 22.5
snapshot_dt = 2.25

[output]
formats = ["csv", "obj"]
"#;

const TORUS_KNOT_2_3_IMMERSED: &str = r#"
name = "torus_knot_2_3_immersed"
formulation = "immersed"

[surface]
name = "torus"
tube_radius = 1.0
center_radius = 4.0

[initial_curve]
type = "torus_knot"
k = 2
l = 3

[solver]
nodes = 200
t_end = 22.5
snapshot_dt = 2.25

[output]
formats = ["csv", "obj"]
"#;

const TORUS_ATTRACT_3_5: &str = r#"
name = "torus_attract_3_5"
formulation = "embedded"

[surface]
name = "torus"
tube_radius = 1.0
center_radius = 4.0

[initial_curve]
type = "torus_knot"
k = 3
l = 5
sample_tube_radius = 2.0
sample_center_radius = 4.0

[flow]
stabilizer_gain = 1.0

[solver]
nodes = 200
t_end = 19.75
snapshot_dt = 0.25

[output]
formats = ["csv", "obj"]
"#;

const KLEIN_KNOT_1_4: &str = r#"
name = "klein_knot_1_4"
formulation = "immersed"

[surface]
name = "klein"

[initial_curve]
type = "torus_knot"
k = 1
l = 4

# the strongly varying metric drags nodes together; fast relaxation keeps
# them apart
[redistribution]
omega = 200.0

[solver]
nodes = 200
t_end = 1.0
snapshot_dt = 0.1

[output]
formats = ["csv", "obj"]
"#;

const BUMP_SURFACE_ELLIPSE: &str = r#"
name = "bump_surface_ellipse"
formulation = "embedded"

[surface]
name = "bump_sphere"
radius = 2.5
stiffness = 4.0
height = 3.0

[initial_curve]
type = "projected_ellipse"
a = 2.0
b = 1.4142135623730951

# the hump flanks bend on a scale close to the 200-node spacing; 300 nodes
# keep the curve on the surface until the length levels off
[solver]
nodes = 300
t_end = 13.5
snapshot_dt = 1.5

[output]
formats = ["csv", "obj"]
"#;

const SPHERE_LATITUDE: &str = r#"
name = "sphere_latitude"
formulation = "embedded"

[surface]
name = "sphere"
radius = 1.0

[initial_curve]
type = "latitude_circle"
theta0_deg = 80.0

[solver]
nodes = 200
t_end = 1.6
snapshot_dt = 0.1
stationary_eps_rel = 0.0
"#;

const GREAT_CIRCLE: &str = r#"
name = "great_circle"
formulation = "embedded"

[surface]
name = "sphere"
radius = 1.0

[initial_curve]
type = "latitude_circle"
theta0_deg = 90.0

[solver]
nodes = 200
t_end = 1.0
snapshot_dt = 0.1
stationary_eps_rel = 0.0
"#;

/// Builtin names with a one-line description each.
pub const BUILTIN: [(&str, &str); 7] = [
    ("torus_knot_2_3", "(2,3) torus knot shrinking on the r=1, R=4 torus"),
    ("torus_knot_2_3_immersed", "the same knot evolved in the parameter square"),
    ("torus_attract_3_5", "(3,5) knot sampled at r=2, attracted onto the r=1, R=4 torus"),
    ("klein_knot_1_4", "(1,4) curve on the immersed Klein bottle"),
    ("bump_surface_ellipse", "projected ellipse on the genus-0 surface with two humps"),
    ("sphere_latitude", "latitude circle at 80 degrees on the unit sphere (closed form)"),
    ("great_circle", "equator of the unit sphere, a stationary geodesic (closed form)"),
];

pub fn builtin_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "torus_knot_2_3" => TORUS_KNOT_2_3,
        "torus_knot_2_3_immersed" => TORUS_KNOT_2_3_IMMERSED,
        "torus_attract_3_5" => TORUS_ATTRACT_3_5,
        "klein_knot_1_4" => KLEIN_KNOT_1_4,
        "bump_surface_ellipse" => BUMP_SURFACE_ELLIPSE,
        "sphere_latitude" => SPHERE_LATITUDE,
        "great_circle" => GREAT_CIRCLE,
        _ => return None,
    })
}

pub fn builtin(name: &str) -> Result<ScenarioConfig, ScenarioError> {
    let text = builtin_text(name).ok_or_else(|| ScenarioError::UnknownScenario(name.to_string()))?;
    parse_config(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::to_toml;

    #[test]
    fn every_builtin_parses_and_round_trips() {
        for (name, _) in BUILTIN {
            let cfg = builtin(name).unwrap();
            assert_eq!(cfg.name, name);
            let again = parse_config(&to_toml(&cfg).unwrap()).unwrap();
            assert_eq!(cfg, again, "{name}");
            cfg.build().unwrap();
        }
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(builtin("nope"), Err(ScenarioError::UnknownScenario(_))));
    }
}
