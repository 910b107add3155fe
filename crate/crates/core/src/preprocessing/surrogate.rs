//! Synthetic stand-in for a localized-fault dataset of a medium-voltage grid.
//!
//! Target records are drawn around a few fault prototypes (cable material,
//! installation, season, hour, location, weather, backbone current, cable
//! section, outage and alarm histories). Raw records are engineered into
//! features with the same pipeline a real dataset would go through, and
//! non-targets are drawn uniformly over the normalized feature space.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::current::{backbone_current_feature, SAMPLE_MINUTES};
use super::geo::{geodesic_distance, GeoBounds, GeoPoint};
use super::io::Record;
use super::normalize::{NormalizationStats, ScalarStats};
use super::synth::{generate_uniform_nontargets, NonTargetProfile};
use crate::error::{Error, Result};
use crate::feature_space::{FeatureDescriptor, FeatureSchema, FeatureValue, Pattern};
use crate::seed;

const HOUR: f64 = 3600.0;

/// Indices of the engineered features, in schema order.
pub mod column {
    pub const MATERIAL: usize = 0;
    pub const INSTALLATION: usize = 1;
    pub const DAY_START: usize = 2;
    pub const TIME_START: usize = 3;
    pub const MEDIAN_POINT: usize = 4;
    pub const FAULT_X: usize = 5;
    pub const FAULT_Y: usize = 6;
    pub const MAX_TEMPERATURE: usize = 7;
    pub const RAIN: usize = 8;
    pub const BACKBONE_CURRENT: usize = 9;
    pub const CABLE_SECTION: usize = 10;
    pub const INTERRUPTIONS: usize = 11;
    pub const PETERSEN_ALARMS: usize = 12;
}

pub fn fault_schema() -> FeatureSchema {
    FeatureSchema::new(vec![
        FeatureDescriptor::categorical("material", ["CU", "AL", "MIXED"]),
        FeatureDescriptor::categorical("installation", ["aerial", "underground"]),
        FeatureDescriptor::circular("day_start", 364),
        FeatureDescriptor::circular("time_start", 1439),
        FeatureDescriptor::quantitative("median_point"),
        FeatureDescriptor::quantitative("fault_x"),
        FeatureDescriptor::quantitative("fault_y"),
        FeatureDescriptor::quantitative("max_temperature"),
        FeatureDescriptor::quantitative("rain"),
        FeatureDescriptor::special("backbone_current"),
        FeatureDescriptor::special("cable_section"),
        FeatureDescriptor::timeseries("interruptions"),
        FeatureDescriptor::timeseries("petersen_alarms"),
    ])
    .expect("static schema is valid")
}

/// Raw description of one fault before feature engineering.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultRecord {
    pub material: String,
    pub installation: String,
    pub day_start: u32,
    pub time_start: u32,
    pub primary_station: GeoPoint,
    pub secondary_stations: [GeoPoint; 2],
    pub location: GeoPoint,
    pub max_temperature: f64,
    pub rain: f64,
    /// Backbone currents every ten minutes over the previous day; may be
    /// truncated when the feeder stopped reporting.
    pub currents: Vec<f64>,
    /// Cable section in mm^2, absent for aerial lines.
    pub cable_section: Option<f64>,
    /// Seconds before the fault of previous outages on the backbone.
    pub interruptions: Vec<f64>,
    /// Seconds before the fault of Petersen-coil alarms.
    pub petersen_alarms: Vec<f64>,
}

struct Prototype {
    material: &'static str,
    installation: &'static str,
    day: f64,
    minute: f64,
    primary: (f64, f64),
    secondaries: [(f64, f64); 2],
    location: (f64, f64),
    temperature: f64,
    rain: f64,
    current_levels: (f64, f64),
    section: Option<f64>,
    interruptions: &'static [f64],
    alarms: &'static [f64],
}

const PROTOTYPES: [Prototype; 3] = [
    Prototype {
        material: "CU",
        installation: "underground",
        day: 200.0,
        minute: 900.0,
        primary: (41.93, 12.45),
        secondaries: [(41.95, 12.52), (41.96, 12.50)],
        location: (41.95, 12.51),
        temperature: 35.0,
        rain: 0.0,
        current_levels: (120.0, 220.0),
        section: Some(185.0),
        interruptions: &[2.0 * HOUR, 30.0 * HOUR],
        alarms: &[0.5 * HOUR, 1.0 * HOUR, 1.5 * HOUR],
    },
    Prototype {
        material: "AL",
        installation: "aerial",
        day: 20.0,
        minute: 240.0,
        primary: (41.82, 12.60),
        secondaries: [(41.85, 12.38), (41.83, 12.40)],
        location: (41.84, 12.39),
        temperature: 6.0,
        rain: 30.0,
        current_levels: (80.0, 90.0),
        section: None,
        interruptions: &[],
        alarms: &[10.0 * HOUR],
    },
    Prototype {
        material: "MIXED",
        installation: "underground",
        day: 110.0,
        minute: 1200.0,
        primary: (41.98, 12.62),
        secondaries: [(41.88, 12.58), (41.87, 12.60)],
        location: (41.88, 12.59),
        temperature: 18.0,
        rain: 8.0,
        current_levels: (150.0, 150.0),
        section: Some(95.0),
        interruptions: &[12.0 * HOUR, 13.0 * HOUR, 14.0 * HOUR, 70.0 * HOUR],
        alarms: &[],
    },
];

fn jitter(rng: &mut ChaCha8Rng, center: f64, sd: f64) -> f64 {
    center + sd * Normal::new(0.0, 1.0).expect("unit normal").sample(rng)
}

fn wrap(value: f64, period: u32) -> u32 {
    (value.round() as i64).rem_euclid(period as i64 + 1) as u32
}

fn sample_fault(rng: &mut ChaCha8Rng, proto: &Prototype) -> FaultRecord {
    let point = |rng: &mut ChaCha8Rng, (lat, lon): (f64, f64), sd: f64| {
        GeoPoint::new(jitter(rng, lat, sd), jitter(rng, lon, sd))
    };
    let events = |rng: &mut ChaCha8Rng, base: &[f64]| {
        let mut xs: Vec<f64> = base.iter().map(|t| jitter(rng, *t, 0.03 * t).max(0.0)).collect();
        xs.sort_by(f64::total_cmp);
        xs
    };
    let (w1, w2) = proto.current_levels;
    let reporting = if rng.random::<f64>() < 0.1 { 60 } else { 144 };
    let currents = (0..reporting)
        .map(|i| jitter(rng, if i < 72 { w1 } else { w2 }, 3.0))
        .collect();
    FaultRecord {
        material: proto.material.into(),
        installation: proto.installation.into(),
        day_start: wrap(jitter(rng, proto.day, 4.0), 364),
        time_start: wrap(jitter(rng, proto.minute, 20.0), 1439),
        primary_station: GeoPoint::new(proto.primary.0, proto.primary.1),
        secondary_stations: [
            point(rng, proto.secondaries[0], 0.002),
            point(rng, proto.secondaries[1], 0.002),
        ],
        location: point(rng, proto.location, 0.004),
        max_temperature: jitter(rng, proto.temperature, 1.5),
        rain: jitter(rng, proto.rain, 1.0).max(0.0),
        currents,
        cable_section: proto.section.map(|s| jitter(rng, s, 2.0)),
        interruptions: events(rng, proto.interruptions),
        petersen_alarms: events(rng, proto.alarms),
    }
}

/// Feature values in raw units (meters, degrees, Celsius, millimetres,
/// amperes, seconds); normalization comes later.
pub fn engineer_features(r: &FaultRecord) -> Pattern {
    let midpoint = r.secondary_stations[0].midpoint(r.secondary_stations[1]);
    Pattern::new(vec![
        FeatureValue::Label(r.material.clone()),
        FeatureValue::Label(r.installation.clone()),
        FeatureValue::Circular(r.day_start),
        FeatureValue::Circular(r.time_start),
        FeatureValue::Scalar(geodesic_distance(r.primary_station, midpoint)),
        FeatureValue::Scalar(r.location.lon),
        FeatureValue::Scalar(r.location.lat),
        FeatureValue::Scalar(r.max_temperature),
        FeatureValue::Scalar(r.rain),
        FeatureValue::Special(backbone_current_feature(&r.currents, SAMPLE_MINUTES)),
        FeatureValue::Special(r.cable_section),
        FeatureValue::Events(r.interruptions.clone()),
        FeatureValue::Events(r.petersen_alarms.clone()),
    ])
}

/// Fits the normalization of engineered records. Fault coordinates are
/// scaled against the rectangle enclosing every primary and secondary
/// station rather than against the faults themselves.
pub fn fit_fault_stats(schema: &FeatureSchema, records: &[FaultRecord]) -> Result<NormalizationStats> {
    let raw: Vec<Pattern> = records.iter().map(engineer_features).collect();
    let mut stats = NormalizationStats::fit(schema, &raw)?;
    let stations: Vec<GeoPoint> = records
        .iter()
        .flat_map(|r| [r.primary_station, r.secondary_stations[0], r.secondary_stations[1]])
        .collect();
    if let Some(b) = GeoBounds::enclosing(&stations) {
        stats.features[column::FAULT_X] = Some(ScalarStats::Affine {
            min: b.min_lon,
            max: b.max_lon,
        });
        stats.features[column::FAULT_Y] = Some(ScalarStats::Affine {
            min: b.min_lat,
            max: b.max_lat,
        });
        stats.spatial = Some(b);
    }
    Ok(stats)
}

/// Sizes of the surrogate problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateSpec {
    pub train_targets: usize,
    pub validation_targets: usize,
    pub test_targets: usize,
    pub validation_nontargets: usize,
    pub test_nontargets: usize,
    pub seed: u64,
}

impl SurrogateSpec {
    /// 150 targets per split; test non-targets sized so that training
    /// targets over test non-targets equals `ratio`.
    pub fn with_ratio(ratio: f64, seed: u64) -> Result<Self> {
        if !(ratio > 0.0) {
            return Err(Error::InvalidArgument(format!("ratio must be positive, got {ratio}")));
        }
        Ok(SurrogateSpec {
            train_targets: 150,
            validation_targets: 150,
            test_targets: 150,
            validation_nontargets: 150,
            test_nontargets: (150.0 / ratio).round() as usize,
            seed,
        })
    }
}

/// Normalized splits plus everything needed to reproduce the normalization.
#[derive(Debug, Clone)]
pub struct SurrogateData {
    pub schema: FeatureSchema,
    pub stats: NormalizationStats,
    pub train: Vec<Pattern>,
    pub validation: Vec<Record>,
    pub test: Vec<Record>,
}

pub fn generate_fault_surrogate(spec: &SurrogateSpec) -> Result<SurrogateData> {
    let schema = fault_schema();
    let faults = |n: usize, stream: u64| -> Vec<FaultRecord> {
        let mut rng = seed::rng(spec.seed, &[stream]);
        (0..n)
            .map(|i| sample_fault(&mut rng, &PROTOTYPES[i % PROTOTYPES.len()]))
            .collect()
    };
    let train_raw = faults(spec.train_targets, 0);
    let stats = fit_fault_stats(&schema, &train_raw)?;
    let normalize =
        |rs: &[FaultRecord]| -> Result<Vec<Pattern>> { rs.iter().map(|r| stats.apply(&engineer_features(r))).collect() };
    let train = normalize(&train_raw)?;
    let profile = NonTargetProfile::fit(&schema, &train);
    let labeled = |targets: Vec<Pattern>, n_other: usize, stream: u64| -> Vec<Record> {
        let others = generate_uniform_nontargets(&schema, &profile, n_other, seed::derive(spec.seed, &[stream]));
        targets
            .into_iter()
            .map(Record::target)
            .chain(others.into_iter().map(Record::non_target))
            .collect()
    };
    let validation = labeled(normalize(&faults(spec.validation_targets, 1))?, spec.validation_nontargets, 2);
    let test = labeled(normalize(&faults(spec.test_targets, 3))?, spec.test_nontargets, 4);
    Ok(SurrogateData {
        schema,
        stats,
        train,
        validation,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_space::FeatureKind;

    #[test]
    fn every_kind_is_present() {
        let schema = fault_schema();
        for kind in ["categorical", "quantitative", "circular", "special_quantitative", "timeseries"] {
            assert!(schema.features().iter().any(|f| f.kind.name() == kind), "{kind}");
        }
    }

    #[test]
    fn patterns_conform_and_include_not_applicable() {
        let data = generate_fault_surrogate(&SurrogateSpec::with_ratio(0.15, 3).unwrap()).unwrap();
        assert_eq!(data.test.len(), 150 + 1000);
        for p in data.train.iter().chain(data.test.iter().map(|r| &r.pattern)) {
            p.validate(&data.schema).unwrap();
        }
        let eps = data
            .train
            .iter()
            .filter(|p| matches!(p.values[column::CABLE_SECTION], FeatureValue::Special(None)))
            .count();
        assert_eq!(eps, 50);
        let lengths: Vec<usize> = data
            .train
            .iter()
            .map(|p| match &p.values[column::INTERRUPTIONS] {
                FeatureValue::Events(xs) => xs.len(),
                _ => unreachable!(),
            })
            .collect();
        assert!(lengths.contains(&0) && lengths.contains(&4));
        for (j, f) in data.schema.features().iter().enumerate() {
            if f.kind == FeatureKind::Quantitative {
                for p in &data.train {
                    match p.values[j] {
                        FeatureValue::Scalar(x) => assert!((0.0..=1.0).contains(&x)),
                        _ => unreachable!(),
                    }
                }
            }
        }
        assert!(data.stats.spatial.is_some());
    }

    #[test]
    fn reproducible() {
        let spec = SurrogateSpec::with_ratio(0.5, 11).unwrap();
        let a = generate_fault_surrogate(&spec).unwrap();
        let b = generate_fault_surrogate(&spec).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn median_point_is_distance_to_secondary_midpoint() {
        let mut rng = seed::rng(0, &[]);
        let r = sample_fault(&mut rng, &PROTOTYPES[0]);
        let p = engineer_features(&r);
        let expected = geodesic_distance(r.primary_station, r.secondary_stations[0].midpoint(r.secondary_stations[1]));
        assert_eq!(p.values[column::MEDIAN_POINT], FeatureValue::Scalar(expected));
        assert!(expected > 1000.0);
    }
}
