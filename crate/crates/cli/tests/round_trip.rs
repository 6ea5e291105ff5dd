use paction_cli::document::{
    Act, DomainLine, GlobalBlock, GroupSpec, InstanceDocument, Kind, MapLine, PartialBlock, QuiverBlock, RestrictLine,
};
use paction_cli::{parse_instance, serialize};
use proptest::prelude::*;
use proptest::sample::{select, subsequence};

/// Names that need quoting as well as plain ones.
fn name() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z][a-z0-9]{0,3}",
        "\\([a-z], [a-z0-9]{1,2}\\)",
        "[a-z]{1,2} [a-z]{1,2}",
        Just("->".to_string()),
        Just("a\"b".to_string()),
        Just("back\\slash".to_string()),
        Just("end".to_string()),
        Just("vertex".to_string()),
    ]
}

fn distinct(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set(name(), n).prop_map(|s| s.into_iter().collect())
}

fn document() -> impl Strategy<Value = InstanceDocument> {
    (1usize..5, distinct(1..5), 0usize..6).prop_flat_map(|(order, vertices, n_arrows)| {
        let elements: Vec<String> =
            (0..order).map(|k| match k { 0 => "e".into(), 1 => "t".into(), k => format!("t{k}") }).collect();
        let v = vertices.clone();
        let arrows = (
            prop::collection::btree_set(name(), n_arrows),
            prop::collection::vec((select(v.clone()), select(v.clone())), n_arrows),
        )
            .prop_map(|(ids, ends)| {
                ids.into_iter().zip(ends).map(|(id, (s, t))| (id, s, t)).collect::<Vec<_>>()
            });
        (Just(order), Just(elements), Just(vertices), arrows).prop_flat_map(|(order, elements, vertices, arrows)| {
            let arrow_ids: Vec<String> = arrows.iter().map(|a| a.0.clone()).collect();
            let el = select(elements.clone());
            let vs = subsequence(vertices.clone(), 0..=vertices.len());
            let ids_for_sets = arrow_ids.clone();
            let as_ = subsequence(ids_for_sets.clone(), 0..=ids_for_sets.len());
            let domains = prop::collection::btree_map(el.clone(), (vs.clone(), as_.clone()), 0..3).prop_map(|m| {
                m.into_iter().map(|(element, (vertices, arrows))| DomainLine { element, vertices, arrows }).collect::<Vec<_>>()
            });
            let vmaps = prop::collection::btree_map(
                (el.clone(), select(vertices.clone())),
                select(vertices.clone()),
                0..4,
            )
            .prop_map(|m| {
                m.into_iter()
                    .map(|((element, from), to)| MapLine { element, kind: Some(Kind::Vertex), from, to })
                    .collect::<Vec<_>>()
            });
            let acts = prop::collection::btree_map((el.clone(), select(vertices.clone())), select(vertices.clone()), 0..4)
                .prop_map(|m| {
                    m.into_iter().map(|((element, from), to)| Act { element, kind: Kind::Vertex, from, to }).collect::<Vec<_>>()
                });
            (
                Just(order),
                Just(vertices.clone()),
                Just(arrows.clone()),
                domains,
                vmaps,
                acts,
                (vs, as_),
                any::<bool>(),
                prop::option::of(0usize..9),
            )
                .prop_map(|(order, vertices, arrows, domains, maps, acts, (rv, ra), restrict, truncate)| {
                    InstanceDocument {
                        group: Some(GroupSpec::Cyclic(order)),
                        quivers: vec![QuiverBlock { name: "Q".into(), vertices, arrows }],
                        globals: vec![GlobalBlock { name: "G".into(), quiver: "Q".into(), acts }],
                        partials: vec![PartialBlock { name: "P".into(), quiver: "Q".into(), domains, maps }],
                        restricts: if restrict {
                            vec![RestrictLine { global: "G".into(), vertices: rv, arrows: ra }]
                        } else {
                            vec![]
                        },
                        truncate,
                    }
                })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_inverts_serialize(doc in document()) {
        let text = serialize(&doc);
        let back = parse_instance(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, doc);
    }
}

#[test]
fn group_tables_round_trip() {
    let doc = InstanceDocument {
        group: Some(GroupSpec::Table {
            name: "Klein four".into(),
            elements: vec!["e".into(), "x".into(), "y".into(), "x y".into()],
            rows: vec![
                ("e".into(), vec!["e".into(), "x".into(), "y".into(), "x y".into()]),
                ("x".into(), vec!["x".into(), "e".into(), "x y".into(), "y".into()]),
                ("y".into(), vec!["y".into(), "x y".into(), "e".into(), "x".into()]),
                ("x y".into(), vec!["x y".into(), "y".into(), "x".into(), "e".into()]),
            ],
        }),
        quivers: vec![QuiverBlock { name: "Q".into(), vertices: vec!["v".into()], arrows: vec![] }],
        ..InstanceDocument::default()
    };
    assert_eq!(parse_instance(&serialize(&doc)).unwrap(), doc);
}
