use actor_risk::scenario::{
    generate_case_study, load_scenario, save_scenario, ActorId, ActorState, CaseStudyParams,
    PhaseName, RoadMap, Scenario, Trajectory,
};
use actor_risk::Error;
use proptest::prelude::*;

#[test]
fn case_study_round_trips_through_toml() {
    let s = generate_case_study(&CaseStudyParams::default()).unwrap();
    let text = save_scenario(&s).unwrap();
    let back = load_scenario(&text).unwrap();
    assert_eq!(back, s);
    assert_eq!(save_scenario(&back).unwrap(), text);
}

#[test]
fn case_study_places_followers_in_the_adjacent_lane() {
    let p = CaseStudyParams::default();
    let s = generate_case_study(&p).unwrap();
    let lc = &s.npc_trajectories[&p.lane_change_actor];
    let end = s.phase_span(PhaseName::LaneChange).unwrap().end_tick;
    assert_eq!(s.map.lane_of(lc.states[end].y), p.ego_lane);
    for id in &p.follow_candidates {
        let tr = &s.npc_trajectories[id];
        assert_eq!(s.map.lane_of(tr.states[end].y), p.ego_lane + 1);
    }
    // The braking actor comes to rest and stays there.
    assert_eq!(lc.last().unwrap().speed, 0.0);
}

#[test]
fn truncated_document_is_a_parse_error() {
    let s = generate_case_study(&CaseStudyParams {
        horizon_ticks: 50,
        ..Default::default()
    })
    .unwrap();
    let text = save_scenario(&s).unwrap();
    let err = load_scenario(&text[..text.len() / 2]).unwrap_err();
    assert!(matches!(err, Error::Parse(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn slicing_past_the_horizon_is_rejected() {
    let map = RoadMap::default();
    let ego = ActorState::new(0.0, map.lane_center(1), 0.0, 0.0);
    let tr = Trajectory::new(
        ActorId::new("a"),
        0,
        0.1,
        vec![ActorState::new(5.0, 1.75, 0.0, 0.0); 11],
    );
    let s = Scenario::empty(map, ego, 10, 0.1).with_actor(tr, 1.0);
    assert!(s.slice_world(5, 5).is_ok());
    assert!(matches!(
        s.slice_world(5, 6),
        Err(Error::WindowOutOfRange { .. })
    ));
}

fn straight(id: String, x0: f64, y: f64, v: f64, ticks: usize) -> Trajectory {
    let states = (0..=ticks)
        .map(|i| ActorState::new(x0 + v * 0.1 * i as f64, y, 0.0, v))
        .collect();
    Trajectory::new(ActorId::new(id), 0, 0.1, states)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arbitrary_scenarios_round_trip(
        ticks in 1usize..40,
        actors in prop::collection::vec((0.0f64..500.0, 0usize..3, 0.0f64..20.0, 0.3f64..2.0), 0..5),
    ) {
        let map = RoadMap::default();
        let ego = ActorState::new(0.0, map.lane_center(1), 0.0, 5.0);
        let s = actors.iter().enumerate().fold(Scenario::empty(map, ego, ticks, 0.1), |s, (i, (x, lane, v, r))| {
            s.with_actor(straight(format!("n{i}"), *x, map.lane_center(*lane), *v, ticks), *r)
        });
        s.validate().unwrap();
        let back = load_scenario(&save_scenario(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}
