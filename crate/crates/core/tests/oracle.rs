use mapgf::family::Family;
use mapgf::maps::{classify, exterior_edge_check, for_each_map, pattern_library, stats, DEFAULT_LIMIT};

#[test]
fn two_connected_faces_are_pure_and_patterns_agree() {
    let library = pattern_library();
    let ellgons: Vec<_> = library.iter().filter(|p| p.name.starts_with("ellgon:")).cloned().collect();
    for n in 1..=5 {
        for_each_map(n, DEFAULT_LIMIT, |m| {
            let flags = classify(m);
            let st = stats(m, &ellgons);
            assert_eq!(st.face_degrees.iter().sum::<usize>(), 2 * n);
            for l in 1..=6 {
                assert!(st.pure_gons(l, true) <= st.faces(l, true));
                // a pure non-root l-gon is exactly an occurrence of the l-cycle
                assert_eq!(st.pattern(&format!("ellgon:{l}")), st.pure_gons(l, false), "{}", m.dump());
                if flags.two_connected {
                    assert_eq!(st.pure_gons(l, true), st.faces(l, true), "{}", m.dump());
                    assert!(exterior_edge_check(m, l), "{}", m.dump());
                }
            }
            if Family::B1.contains(&flags) {
                assert!(st.face_degrees.iter().all(|d| d % 2 == 0));
            }
        })
        .unwrap();
    }
}
