//! Built-in reproduction setups.

use std::f64::consts::PI;

use phasegeo::config::{Axis, ObjectSpec, RunConfig};
use phasegeo::potential::PotentialKind::{AmbrosioTortorelli as At, WillmoreCahnHilliard as Wch};
use phasegeo::solver::{GeodesicMode::GeneralSweep as Sweep, SeedU};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    /// What a finished run should look like.
    pub expected: &'static str,
    build: fn() -> RunConfig,
}

impl Preset {
    pub fn config(&self) -> RunConfig {
        (self.build)()
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "steiner3",
        summary: "three points on a circle of radius 0.3, AT model",
        expected: "network length within 5% of 3R = 0.9, one Steiner point at the centre",
        build: || points_on_circle("steiner3", 3),
    },
    Preset {
        name: "steiner4",
        summary: "four points on a circle of radius 0.3, AT model",
        expected: "two Steiner points; length below the star 4R = 1.2, close to R(1 + sqrt 3) sqrt 2",
        build: || points_on_circle("steiner4", 4),
    },
    Preset {
        name: "mcf_demo",
        summary: "WCH flow of two overlapping circles, no geodesic term",
        expected: "the union shrinks and smooths; triple junctions persist while the sheets stay at u = 1/4",
        build: || {
            let mut c = RunConfig::new("mcf_demo", Wch, 2, 128)
                .object(0, circle2([0.42, 0.5], 0.2))
                .object(1, circle2([0.58, 0.5], 0.2));
            c.seed_u = Some(SeedU::Objects(vec![0, 1]));
            c.max_iters = 500;
            c.convergence_window = 0;
            c.snapshot_every = 100;
            c
        },
    },
    Preset {
        name: "plateau_d1_a",
        summary: "horizontal circle R = 0.3 with its centre point",
        expected: "a flat disk of area close to 0.2827 that separates the cylinder",
        build: || {
            plateau("plateau_d1_a", 300)
                .object(0, ObjectSpec::horizontal_circle([0.5, 0.5, 0.5], 0.3))
                .object(1, ObjectSpec::Point([0.5, 0.5, 0.5]))
                .pair(0, 1, Sweep)
        },
    },
    Preset {
        name: "plateau_d1_b",
        summary: "saddle-shaped graph over the circle R = 0.3 with the axis midpoint",
        expected: "a single saddle sheet spanning the curve, one mesh component",
        build: || {
            plateau("plateau_d1_b", 400)
                .object(0, wavy([0.5, 0.5, 0.5], 0.3, 0.06, 2, 0.0))
                .object(1, ObjectSpec::Point([0.5, 0.5, 0.5]))
                .pair(0, 1, Sweep)
        },
    },
    Preset {
        name: "plateau_2circ_cat",
        summary: "coaxial circles R = 0.25 at distance 0.25",
        expected: "a catenoid neck, area near 0.3745 and below the cylinder 0.3927",
        build: || two_circles("plateau_2circ_cat", 0.25, 0.25).pair(0, 1, Sweep),
    },
    Preset {
        name: "plateau_2circ_pert",
        summary: "as plateau_2circ_cat with wavy boundary curves",
        expected: "a perturbed catenoid, one mesh component",
        build: || {
            plateau("plateau_2circ_pert", 400)
                .object(0, wavy([0.5, 0.5, 0.375], 0.25, 0.02, 3, 0.0))
                .object(1, wavy([0.5, 0.5, 0.625], 0.25, 0.02, 3, PI / 3.0))
                .pair(0, 1, Sweep)
        },
    },
    Preset {
        name: "plateau_2circ_nonor",
        summary: "two circles tilted in opposite directions",
        expected: "a twisted sheet joining both curves, one mesh component",
        build: || {
            let tilt = 0.5f64;
            plateau("plateau_2circ_nonor", 400)
                .object(0, tilted([0.5, 0.5, 0.4], 0.22, tilt))
                .object(1, tilted([0.5, 0.5, 0.6], 0.22, -tilt))
                .pair(0, 1, Sweep)
        },
    },
    Preset {
        name: "plateau_2circ_far",
        summary: "coaxial circles R = 0.2 at distance 0.5, beyond the catenoid range",
        expected: "two disks joined by a thin tube; area below the cylinder 0.6283",
        build: || two_circles("plateau_2circ_far", 0.2, 0.5).pair(0, 1, Sweep),
    },
    Preset {
        name: "plateau_cfg2",
        summary: "the catenoid circles, each connected to a point of itself",
        expected: "surfaces made of at least two pieces of area (disk type), not the catenoid alone",
        build: || {
            two_circles("plateau_cfg2", 0.25, 0.25)
                .object(2, ObjectSpec::Point([0.75, 0.5, 0.375]))
                .object(3, ObjectSpec::Point([0.75, 0.5, 0.625]))
                .pair(0, 2, Sweep)
                .pair(1, 3, Sweep)
        },
    },
    Preset {
        name: "plateau_3curve_c1",
        summary: "three coaxial circles, every pair of curves connected",
        expected: "two stacked catenoid-like bands through the middle circle",
        build: || three_circles("plateau_3curve_c1").pair(0, 1, Sweep).pair(0, 2, Sweep).pair(1, 2, Sweep),
    },
    Preset {
        name: "plateau_3curve_c2",
        summary: "three coaxial circles connected to points of each other",
        expected: "a stationary spanning surface touching all three curves",
        build: || {
            three_circles("plateau_3curve_c2")
                .object(3, ObjectSpec::Point([0.75, 0.5, 0.3]))
                .object(4, ObjectSpec::Point([0.75, 0.5, 0.5]))
                .object(5, ObjectSpec::Point([0.75, 0.5, 0.7]))
                .pair(0, 3, Sweep)
                .pair(0, 4, Sweep)
                .pair(1, 3, Sweep)
                .pair(1, 5, Sweep)
                .pair(2, 3, Sweep)
                .pair(2, 4, Sweep)
        },
    },
    Preset {
        name: "cube",
        summary: "the six face boundaries of a cube of side 0.4",
        expected: "a non-smooth surface with interior triple lines; one mesh component",
        build: || {
            let (c, s) = (0.5, 0.4);
            let faces = [
                ([c - s / 2.0, c, c], Axis::X),
                ([c + s / 2.0, c, c], Axis::X),
                ([c, c - s / 2.0, c], Axis::Y),
                ([c, c + s / 2.0, c], Axis::Y),
                ([c, c, c - s / 2.0], Axis::Z),
                ([c, c, c + s / 2.0], Axis::Z),
            ];
            let mut cfg = plateau("cube", 600);
            for (k, (center, axis)) in faces.into_iter().enumerate() {
                let sq = ObjectSpec::Square {
                    center,
                    side: s,
                    axis,
                    samples: 256,
                };
                let first = phasegeo::config::square_curve(center, s, axis, 256).unwrap().samples()[0];
                cfg = cfg.object(k, sq).object(6 + k, ObjectSpec::Point(first));
            }
            for k in 0..6 {
                cfg = cfg.pair(k, 6 + k, Sweep).pair(k, 6 + (k + 1) % 6, Sweep);
            }
            cfg
        },
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Preset names close to `name`, best first.
pub fn suggestions(name: &str) -> Vec<&'static str> {
    let mut scored: Vec<(f64, &str)> = PRESETS
        .iter()
        .map(|p| (strsim::jaro_winkler(name, p.name), p.name))
        .filter(|(s, _)| *s > 0.7)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.into_iter().take(3).map(|(_, n)| n).collect()
}

fn points_on_circle(name: &str, k: usize) -> RunConfig {
    let mut c = RunConfig::new(name, At, 2, 128);
    for i in 0..k {
        let a = PI / 2.0 + 2.0 * PI * i as f64 / k as f64;
        c = c.object(i, ObjectSpec::Point([0.5 + 0.3 * a.cos(), 0.5 + 0.3 * a.sin(), 0.0]));
    }
    for i in 1..k {
        c = c.pair(i, 0, Sweep);
    }
    c
}

fn circle2(center: [f64; 2], r: f64) -> ObjectSpec {
    ObjectSpec::Circle {
        center: [center[0], center[1], 0.0],
        radius: r,
        normal: [0.0, 0.0, 1.0],
        samples: 256,
    }
}

fn plateau(name: &str, iters: usize) -> RunConfig {
    let mut c = RunConfig::new(name, Wch, 3, 64);
    c.max_iters = iters;
    c
}

fn two_circles(name: &str, r: f64, sep: f64) -> RunConfig {
    plateau(name, 400)
        .object(0, ObjectSpec::horizontal_circle([0.5, 0.5, 0.5 - sep / 2.0], r))
        .object(1, ObjectSpec::horizontal_circle([0.5, 0.5, 0.5 + sep / 2.0], r))
}

fn three_circles(name: &str) -> RunConfig {
    plateau(name, 500)
        .object(0, ObjectSpec::horizontal_circle([0.5, 0.5, 0.3], 0.25))
        .object(1, ObjectSpec::horizontal_circle([0.5, 0.5, 0.5], 0.25))
        .object(2, ObjectSpec::horizontal_circle([0.5, 0.5, 0.7], 0.25))
}

/// Graph curve with `amp * sin(k theta + phase)` heights.
fn wavy(center: [f64; 3], r: f64, amp: f64, k: usize, phase: f64) -> ObjectSpec {
    let m = 32;
    ObjectSpec::Graph {
        center,
        radius: r,
        heights: (0..m)
            .map(|j| amp * (k as f64 * 2.0 * PI * j as f64 / m as f64 + phase).sin())
            .collect(),
        samples: 256,
    }
}

fn tilted(center: [f64; 3], r: f64, angle: f64) -> ObjectSpec {
    ObjectSpec::Circle {
        center,
        radius: r,
        normal: [angle.sin(), 0.0, angle.cos()],
        samples: 256,
    }
}
