//! JSON and CSV formats.
//!
//! * state: `{"amplitudes": [[re, im], [re, im], [re, im], [re, im]]}`
//! * generator: `{"matrix": [[[re, im] x 4] x 4]}`, row-major
//! * coordinates: a [`BundleCoords`] object (has `"chart"`), a [`BlochPair`]
//!   (`"q1"`, `"q2"`) or an [`AxisAngleRotation`] (`"axis"`, `"angle"`)
//! * trajectories: CSV with the columns of [`TRAJECTORY_HEADER`]

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bundle::{reconstruct_with, BundleCoords};
use crate::dynamics::{Coordinates, HermitianGenerator, TrajectoryPoint};
use crate::error::Error;
use crate::extremes::{compose_unentangled, state_from_rotation, AxisAngleRotation, BlochPair};
use crate::linalg::{c, TwoQubitState, C64};
use crate::tolerance::Tolerances;

/// Failure to read one of the wire formats.
#[derive(Debug, thiserror::Error)]
pub enum WireError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unrecognized coordinate object: expected a \"chart\", \"axis\" or \"q1\" key")]
    UnknownCoordinates,
    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    amplitudes: [[f64; 2]; 4],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorJson {
    matrix: [[[f64; 2]; 4]; 4],
}

/// Parses and normalizes a state.
pub fn parse_state(text: &str) -> Result<TwoQubitState, WireError> {
    let raw: StateJson = serde_json::from_str(text)?;
    Ok(TwoQubitState::new(raw.amplitudes.map(|[re, im]| c(re, im)))?)
}

/// State JSON with every component printed to 17 significant digits.
pub fn format_state(state: &TwoQubitState) -> String {
    let mut out = String::from("{\"amplitudes\":[");
    for (k, a) in state.amplitudes().iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "[{:.16e},{:.16e}]", a.re, a.im).expect("writing to a String");
    }
    out.push_str("]}");
    out
}

pub fn parse_generator(text: &str) -> Result<HermitianGenerator, WireError> {
    let raw: GeneratorJson = serde_json::from_str(text)?;
    let m = raw.matrix.map(|row| row.map(|[re, im]| c(re, im)));
    Ok(HermitianGenerator::new(m)?)
}

pub fn format_generator(h: &HermitianGenerator) -> String {
    let matrix = h.matrix().map(|row| row.map(|z: C64| [z.re, z.im]));
    serde_json::to_string(&GeneratorJson { matrix }).expect("plain data serializes")
}

/// Reads any of the three coordinate payloads, dispatching on its keys.
pub fn parse_coordinates(text: &str) -> Result<Coordinates, WireError> {
    let value: Value = serde_json::from_str(text)?;
    let has = |key: &str| value.get(key).is_some();
    if has("chart") {
        Ok(Coordinates::Partial(serde_json::from_value::<BundleCoords>(value)?))
    } else if has("axis") {
        Ok(Coordinates::Full(serde_json::from_value::<AxisAngleRotation>(value)?))
    } else if has("q1") {
        Ok(Coordinates::Unentangled(serde_json::from_value::<BlochPair>(value)?))
    } else {
        Err(WireError::UnknownCoordinates)
    }
}

pub fn format_coordinates(coords: &Coordinates) -> String {
    match coords {
        Coordinates::Partial(k) => serde_json::to_string(k),
        Coordinates::Unentangled(p) => serde_json::to_string(p),
        Coordinates::Full(r) => serde_json::to_string(r),
    }
    .expect("plain data serializes")
}

/// The state a coordinate payload describes.
pub fn coordinates_to_state(coords: &Coordinates, tol: &Tolerances) -> Result<TwoQubitState, Error> {
    match coords {
        Coordinates::Partial(k) => reconstruct_with(k, tol),
        Coordinates::Unentangled(p) => Ok(compose_unentangled(p)),
        Coordinates::Full(r) => Ok(state_from_rotation(r)),
    }
}

pub const TRAJECTORY_HEADER: [&str; 13] = [
    "t",
    "stratum",
    "concurrence",
    "chart",
    "theta1",
    "phi1",
    "theta2",
    "phi2",
    "gamma",
    "axis_x",
    "axis_y",
    "axis_z",
    "angle",
];

#[derive(Serialize, Default)]
struct TrajectoryRow {
    t: f64,
    stratum: &'static str,
    concurrence: f64,
    chart: Option<String>,
    theta1: Option<f64>,
    phi1: Option<f64>,
    theta2: Option<f64>,
    phi2: Option<f64>,
    gamma: Option<f64>,
    axis_x: Option<f64>,
    axis_y: Option<f64>,
    axis_z: Option<f64>,
    angle: Option<f64>,
}

impl From<&TrajectoryPoint> for TrajectoryRow {
    fn from(p: &TrajectoryPoint) -> Self {
        let mut row = TrajectoryRow {
            t: p.t,
            stratum: p.stratum.as_str(),
            concurrence: p.concurrence,
            ..Default::default()
        };
        match p.coords {
            Coordinates::Unentangled(pair) => {
                row.theta1 = Some(pair.p1.theta());
                row.phi1 = Some(pair.p1.phi());
                row.theta2 = Some(pair.p2.theta());
                row.phi2 = Some(pair.p2.phi());
            }
            Coordinates::Partial(k) => {
                row.chart = Some(k.chart.to_string());
                row.theta1 = Some(k.theta1);
                row.phi1 = Some(k.phi1);
                row.theta2 = Some(k.theta2);
                row.phi2 = Some(k.phi2);
                row.gamma = Some(k.gamma);
            }
            Coordinates::Full(r) => {
                let [x, y, z] = r.axis();
                row.axis_x = Some(x);
                row.axis_y = Some(y);
                row.axis_z = Some(z);
                row.angle = Some(r.angle());
            }
        }
        row
    }
}

/// Writes a trajectory as CSV; columns unused by a point's stratum are empty.
pub fn write_trajectory_csv<W: io::Write>(points: &[TrajectoryPoint], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if points.is_empty() {
        w.write_record(TRAJECTORY_HEADER)?;
    }
    for p in points {
        w.serialize(TrajectoryRow::from(p))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Chart;
    use crate::dynamics::coordinate_trajectory;
    use crate::entanglement::standard_state;

    #[test]
    fn state_json_normalizes() {
        let s = parse_state(r#"{"amplitudes":[[2,0],[0,0],[0,0],[0,0]]}"#).unwrap();
        assert_eq!(s, TwoQubitState::basis(0, 0));
    }

    #[test]
    fn state_json_errors() {
        assert!(matches!(
            parse_state(r#"{"amplitudes":[[0,0],[0,0],[0,0],[0,0]]}"#),
            Err(WireError::Invalid(Error::DegenerateState))
        ));
        assert!(matches!(parse_state("{\"amplitudes\":[[1,0]]}"), Err(WireError::Json(_))));
        assert!(matches!(parse_state("not json"), Err(WireError::Json(_))));
    }

    #[test]
    fn formatted_state_round_trips_exactly() {
        let s = TwoQubitState::new([c(0.3, -0.1), c(1e-7, 0.2), c(-0.5, 0.0), c(0.1, 0.9)]).unwrap();
        let text = format_state(&s);
        let back = parse_state(&text).unwrap();
        for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(text.contains("e-1"));
    }

    #[test]
    fn coordinates_dispatch_on_keys() {
        let k = parse_coordinates(
            r#"{"chart":"SN","eta":0.5,"theta1":2.0,"phi1":0.1,"theta2":1.0,"phi2":0.2,"gamma":0.3}"#,
        )
        .unwrap();
        assert!(matches!(k, Coordinates::Partial(b) if b.chart == Chart::SN));

        let r = parse_coordinates(r#"{"axis":[1,0,0],"angle":3.141592653589793}"#).unwrap();
        assert!(matches!(r, Coordinates::Full(_)));

        let p = parse_coordinates(r#"{"q1":{"theta":0,"phi":0},"q2":{"theta":1,"phi":2}}"#).unwrap();
        assert!(matches!(p, Coordinates::Unentangled(_)));

        assert!(matches!(parse_coordinates("{}"), Err(WireError::UnknownCoordinates)));
        assert!(parse_coordinates(r#"{"chart":"XX"}"#).is_err());
    }

    #[test]
    fn generator_json_round_trip() {
        let h = HermitianGenerator::local(
            &crate::linalg::Mat2::SIGMA_Y,
            &crate::linalg::Mat2::SIGMA_Z,
        )
        .unwrap();
        assert_eq!(parse_generator(&format_generator(&h)).unwrap(), h);
        let bad = r#"{"matrix":[[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#;
        assert!(matches!(
            parse_generator(bad),
            Err(WireError::Invalid(Error::NonHermitian { .. }))
        ));
    }

    #[test]
    fn csv_has_header_and_empty_unused_columns() {
        let states = vec![
            (0.0, standard_state(0.0).unwrap()),
            (0.5, standard_state(0.4).unwrap()),
            (1.0, standard_state(std::f64::consts::FRAC_PI_2).unwrap()),
        ];
        let pts = coordinate_trajectory(&states, &Tolerances::default()).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_HEADER.join(","));
        assert_eq!(lines[1], "0.0,unentangled,0.0,,0.0,0.0,0.0,0.0,,,,,");
        assert!(lines[2].starts_with("0.5,partial,"));
        assert!(lines[2].contains(",NN,"));
        assert!(lines[3].starts_with("1.0,full,1.0,,,,,,,"));
        assert_eq!(lines.len(), 4);
    }
}
