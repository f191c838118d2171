macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(triangulate_polygon, "triangulate_polygon.rs", triangulate_polygon_example_runs);
example!(circle_coverage, "circle_coverage.rs", circle_coverage_example_runs);
example!(slice_cube, "slice_cube.rs", slice_cube_example_runs);
example!(locate_towers, "locate_towers.rs", locate_towers_example_runs);
example!(two_round_locate, "two_round_locate.rs", two_round_locate_example_runs);
example!(height_projection, "height_projection.rs", height_projection_example_runs);
example!(accuracy_map, "accuracy_map.rs", accuracy_map_example_runs);
example!(report_replay, "report_replay.rs", report_replay_example_runs);
example!(triangulation_growth, "triangulation_growth.rs", triangulation_growth_example_runs);
