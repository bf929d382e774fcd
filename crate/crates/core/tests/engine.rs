use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use noa_cluster::ga::{run, GaState};
use noa_cluster::{
    fitness, Aggregation, AttributeSchema, AttributeView, Edge, EdgeKey, EventKind, FitnessParams, GaConfig,
    GraphSnapshot, NodeId, Scheme, UpdateEvent,
};

fn graph(n: u32, rows: &[(u32, u32, u64)]) -> GraphSnapshot {
    let mut seen = BTreeSet::new();
    let edges: Vec<Edge> = rows
        .iter()
        .filter(|(a, b, _)| a != b && seen.insert(EdgeKey::pair(*a, *b)))
        .map(|(a, b, w)| Edge::new(*a, *b, vec![*w]).unwrap())
        .collect();
    GraphSnapshot::from_parts(AttributeSchema::new(["w"]).unwrap(), (0..n).map(NodeId), edges, Default::default())
        .unwrap()
}

fn arb_graph() -> impl Strategy<Value = GraphSnapshot> {
    (3u32..12)
        .prop_flat_map(|n| prop::collection::vec((0..n, 0..n, 1u64..6), 1..30).prop_map(move |rows| graph(n, &rows)))
}

fn arb_scheme() -> impl Strategy<Value = Scheme> {
    prop_oneof![Just(Scheme::EdgeRemoval), Just(Scheme::Separator)]
}

fn small_config(seed: u64, scheme: Scheme) -> GaConfig {
    GaConfig { population_size: 12, max_evaluations: 300, checkpoint_every: 10, scheme, ..GaConfig::default() }
        .with_seed(seed)
}

/// Events that are valid when applied in order to `g`.
fn valid_events(g: &GraphSnapshot, picks: &[(u8, u32, u32, u64)]) -> Vec<UpdateEvent> {
    let mut cur = g.clone();
    let mut out = Vec::new();
    for (i, (op, a, b, w)) in picks.iter().enumerate() {
        let tick = 5 + 7 * i as u64;
        let nodes: Vec<NodeId> = cur.nodes().iter().copied().collect();
        let keys: Vec<EdgeKey> = cur.edges().map(|(k, _)| k).collect();
        let kind = match op % 4 {
            0 => EventKind::AddNode { node: cur.next_free_id(), label: None },
            1 => {
                let (x, y) = (nodes[*a as usize % nodes.len()], nodes[*b as usize % nodes.len()]);
                match EdgeKey::new(x, y) {
                    Ok(k) if cur.weights(&k).is_none() => EventKind::AddEdge(Edge { key: k, weights: vec![*w] }),
                    _ => continue,
                }
            }
            2 if !keys.is_empty() => {
                EventKind::UpdateEdgeWeight { key: keys[*a as usize % keys.len()], attr: 0, value: *w % 6 }
            }
            3 if !keys.is_empty() => EventKind::RemoveEdge(keys[*a as usize % keys.len()]),
            _ => continue,
        };
        let event = UpdateEvent::new(tick, kind);
        cur = cur.apply_event(&event).unwrap();
        out.push(event);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn steps_keep_the_population_sound(g in arb_graph(), seed in any::<u64>(), scheme in arb_scheme()) {
        let view = AttributeView::new(Arc::new(g), vec![0], Aggregation::Sum).unwrap();
        let cfg = small_config(seed, scheme);
        let mut state = GaState::init(view.clone(), cfg.clone()).unwrap();
        let mut best = state.best().total();
        while state.step().is_ok() {
            prop_assert_eq!(state.population().len(), cfg.population_size);
            prop_assert!(state.evaluations_used() <= cfg.max_evaluations);
            prop_assert!(state.best().total() >= best);
            best = state.best().total();
            for ind in state.population() {
                prop_assert!(ind.chromosome.is_repaired(&view));
                prop_assert!(ind.total() <= best);
            }
        }
        prop_assert!(state.evaluations_used() + 1 >= cfg.max_evaluations);
        let p = state.snapshot_best();
        prop_assert!(p.is_valid_cover(&view));
        prop_assert_eq!(fitness(&p, &view, &cfg.fitness).unwrap().total, best);
    }

    #[test]
    fn runs_survive_random_event_streams(
        g in arb_graph(),
        picks in prop::collection::vec((any::<u8>(), any::<u32>(), any::<u32>(), 1u64..6), 0..12),
        seed in any::<u64>(),
        scheme in arb_scheme(),
    ) {
        let events = valid_events(&g, &picks);
        let view = AttributeView::new(Arc::new(g.clone()), vec![0], Aggregation::Sum).unwrap();
        let cfg = small_config(seed, scheme);
        let outcome = run(view, cfg.clone(), &events).unwrap();
        // every event bumps the version once, so the version counts the applied prefix
        let applied = outcome.view.version() as usize;
        let mut expected = g;
        for e in &events[..applied] {
            expected = expected.apply_event(e).unwrap();
        }
        prop_assert!(events[applied..].iter().all(|e| e.tick >= outcome.iterations as u64));
        prop_assert!(outcome.view.base().same_content(&expected));
        prop_assert!(outcome.best.is_valid_cover(&outcome.view));
        let f = fitness(&outcome.best, &outcome.view, &FitnessParams::default()).unwrap();
        prop_assert_eq!(f.total, outcome.best_fitness.total);
        prop_assert!(outcome.evaluations_used <= cfg.max_evaluations);
        for w in outcome.checkpoints.windows(2) {
            if w[0].version == w[1].version {
                prop_assert!(w[1].best_total >= w[0].best_total);
            }
        }
        prop_assert!(outcome.history.records().windows(2).all(|w| w[0].tick <= w[1].tick));
        prop_assert!(outcome.checkpoints.last().unwrap().is_final);
    }
}

#[test]
fn identical_inputs_give_identical_runs() {
    let g = graph(
        10,
        &[(0, 1, 3), (1, 2, 4), (2, 0, 2), (3, 4, 5), (4, 5, 1), (5, 3, 2), (2, 3, 1), (6, 7, 2), (8, 9, 4), (7, 8, 1)],
    );
    let view = AttributeView::new(Arc::new(g), vec![0], Aggregation::Sum).unwrap();
    let events = [UpdateEvent::new(40, EventKind::RemoveEdge(EdgeKey::pair(2, 3)))];
    let a = run(view.clone(), GaConfig::default().with_seed(17), &events).unwrap();
    let b = run(view, GaConfig::default().with_seed(17), &events).unwrap();
    assert_eq!(a.checkpoints, b.checkpoints);
    assert_eq!(a.history, b.history);
    assert_eq!(a.best, b.best);
}

#[test]
fn events_after_the_budget_are_not_applied() {
    let g = graph(4, &[(0, 1, 3), (1, 2, 4), (2, 3, 1)]);
    let view = AttributeView::new(Arc::new(g), vec![0], Aggregation::Sum).unwrap();
    let events = [UpdateEvent::new(1_000_000, EventKind::RemoveEdge(EdgeKey::pair(0, 1)))];
    let outcome = run(view, small_config(1, Scheme::EdgeRemoval), &events).unwrap();
    assert_eq!(outcome.view.version(), 0);
    assert!(outcome.changes.is_empty());
}
