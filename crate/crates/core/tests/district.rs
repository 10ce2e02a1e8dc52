use ganaug::district::*;
use proptest::prelude::*;

fn decision() -> impl Strategy<Value = DecisionVector> {
    let fields: Vec<_> = FIELD_RANGES.iter().map(|&(lo, hi)| lo..=hi).collect();
    fields.prop_map(|v| DecisionVector::from_array(v.try_into().unwrap()))
}

/// Designs that satisfy the layout rules: one plant, at least one building.
fn feasible_decision() -> impl Strategy<Value = DecisionVector> {
    (decision(), 0..NODE_COUNT, 1..=4i32).prop_map(|(d, plant, first)| {
        let mut v = d.to_array();
        for (i, slot) in v.iter_mut().take(NODE_COUNT).enumerate() {
            if i == plant {
                *slot = PLANT;
            } else if *slot == PLANT {
                *slot = EMPTY;
            }
        }
        let other = (plant + 1) % NODE_COUNT;
        if v[..NODE_COUNT].iter().all(|&n| n == EMPTY || n == PLANT) {
            v[other] = first;
        }
        DecisionVector::from_array(v)
    })
}

fn model() -> &'static ReferenceModel {
    static MODEL: std::sync::OnceLock<ReferenceModel> = std::sync::OnceLock::new();
    MODEL.get_or_init(ReferenceModel::reference)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluation_agrees_with_validation(d in decision()) {
        let e = model().evaluate(&d);
        prop_assert_eq!(e.objectives().is_some(), validate(&d).is_feasible());
        prop_assert_eq!(e.violation_count(), validate(&d).violations().len());
    }

    #[test]
    fn objectives_are_in_range_and_deterministic(d in feasible_decision()) {
        let a = model().evaluate(&d).objectives().expect("feasible");
        let b = model().evaluate(&d).objectives().unwrap();
        prop_assert_eq!(a.to_array().map(f64::to_bits), b.to_array().map(f64::to_bits));
        prop_assert!(a.lcc.is_finite());
        prop_assert!(a.ghg >= 0.0 && a.ghg.is_finite());
        prop_assert!((0.0..=MAX_WALKSCORE).contains(&a.walkscore));
        prop_assert_eq!(a.walkscore, walkscore(&d));
    }

    #[test]
    fn pipe_network_is_sum_of_per_edge_minima(d in feasible_decision()) {
        let m = model();
        let c = m.catalog();
        let net = m.solve_pipe_network(&d).unwrap();
        let dt = m.mean_supply_temp(&d) - c.site.ground_temp_c;
        let factor = c.heat_loss_price_factor();
        let plant = d.plant_node().unwrap();
        let expected: f64 = d
            .buildings()
            .map(|(node, _)| {
                let len = m.geometry().distance(plant, node);
                c.pipe
                    .iter()
                    .map(|p| p.unit_cost * len + p.loss_coefficient * len * dt * factor)
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        prop_assert!((net.total_cost() - expected).abs() <= 1e-9 * expected.abs().max(1.0));
        prop_assert_eq!(net.edges.len(), d.building_count());
    }

    #[test]
    fn hotter_supply_never_makes_the_network_cheaper(d in feasible_decision()) {
        let m = model();
        let mut v = d.to_array();
        let mut last = f64::NEG_INFINITY;
        for t in (50..=95).step_by(5) {
            v[6] = t;
            let cost = m.solve_pipe_network(&DecisionVector::from_array(v)).unwrap().total_cost();
            prop_assert!(cost >= last - 1e-9);
            last = cost;
        }
    }
}

#[test]
fn layout_violations_are_reported() {
    let no_plant = DecisionVector::from_array([1, 2, 0, 0, 1, 1, 60, 0, 5, 0]);
    assert!(!validate(&no_plant).is_feasible());
    assert!(model().evaluate(&no_plant).objectives().is_none());
    let two_plants = DecisionVector::from_array([5, 5, 1, 0, 1, 1, 60, 0, 5, 0]);
    assert!(!validate(&two_plants).is_feasible());
    let no_buildings = DecisionVector::from_array([5, 0, 0, 0, 1, 1, 60, 0, 5, 0]);
    assert!(!validate(&no_buildings).is_feasible());
}

#[test]
fn mixing_types_raises_walkscore() {
    let one = DecisionVector::from_array([5, 1, 1, 1, 1, 1, 60, 0, 5, 0]);
    let three = DecisionVector::from_array([5, 1, 2, 3, 1, 1, 60, 0, 5, 0]);
    assert_eq!(model().evaluate(&one).objectives().unwrap().walkscore, 0.0);
    assert_eq!(model().evaluate(&three).objectives().unwrap().walkscore, 10.0);
}
