//! End-to-end exercise of the C ABI from Rust.

use std::ffi::CStr;
use std::ptr;

use ranklim_ffi::*;

#[test]
fn full_pipeline_through_the_c_abi() {
    unsafe {
        let mut graph: *mut RlGraph = ptr::null_mut();
        let status = rl_graph_generate(
            RlModel::Ird,
            RlDcmMode::Multigraph,
            2000,
            1.5,
            8.0,
            2.5,
            12.0,
            RlDependence::Independent,
            0.85,
            false,
            42,
            &mut graph,
        );
        assert_eq!(status, RlStatus::Ok);
        assert_eq!(rl_graph_vertex_count(graph), 2000);
        assert!(rl_graph_edge_count(graph) > 0);

        let mut ranks: *mut RlRanks = ptr::null_mut();
        assert_eq!(rl_pagerank(graph, 0.85, 30, &mut ranks), RlStatus::Ok);
        assert_eq!(rl_ranks_len(ranks), 2000);
        assert_eq!(rl_ranks_iterations(ranks), 30);
        let bound = rl_ranks_residual_bound(ranks);
        assert!((bound - rl_iteration_error_bound(0.85, 30, 0.15)).abs() < 1e-15);
        let data = rl_ranks_data(ranks);
        assert!(!data.is_null());
        let values = std::slice::from_raw_parts(data, 2000);
        assert!(values.iter().all(|v| v.is_finite() && *v > 0.0));

        let mut law: *mut RlLaw = ptr::null_mut();
        assert_eq!(rl_law_ird_from_graph(graph, 0.0, &mut law), RlStatus::Ok);
        let mut pool: *mut RlPool = ptr::null_mut();
        assert_eq!(
            rl_population_dynamics(law, 5000, 15, 7, &mut pool),
            RlStatus::Ok
        );
        assert_eq!(rl_pool_len(pool), 5000);
        assert!(rl_pool_rho1(pool) < 1.0);

        let mut samples = vec![0.0f64; 4000];
        assert_eq!(
            rl_sample_r_star(law, pool, 4000, 9, samples.as_mut_ptr()),
            RlStatus::Ok
        );
        assert!(samples.windows(2).all(|w| w[0] <= w[1]), "sorted output");

        let mut w1 = f64::NAN;
        assert_eq!(
            rl_wasserstein1(
                samples.as_ptr(),
                2000,
                samples.as_ptr().add(2000),
                2000,
                &mut w1
            ),
            RlStatus::Ok
        );
        assert!(w1.is_finite());

        let mut alpha = f64::NAN;
        assert_eq!(
            rl_hill_index(values.as_ptr(), 2000, 50, &mut alpha),
            RlStatus::Ok
        );
        assert!(alpha > 0.0);

        rl_pool_free(pool);
        rl_law_free(law);
        rl_ranks_free(ranks);
        rl_graph_free(graph);
    }
}

#[test]
fn graph_csv_round_trip_through_the_abi() {
    unsafe {
        let dir = std::env::temp_dir().join(format!("ranklim_ffi_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let prefix = dir.join("g");
        let prefix_c = std::ffi::CString::new(prefix.to_str().unwrap()).unwrap();

        let mut graph: *mut RlGraph = ptr::null_mut();
        assert_eq!(
            rl_graph_generate(
                RlModel::Dcm,
                RlDcmMode::Erased,
                500,
                1.5,
                8.0,
                2.5,
                12.0,
                RlDependence::PowerCoupled,
                0.85,
                false,
                3,
                &mut graph,
            ),
            RlStatus::Ok
        );
        assert_eq!(rl_graph_write_csv(graph, prefix_c.as_ptr()), RlStatus::Ok);

        let mut loaded: *mut RlGraph = ptr::null_mut();
        assert_eq!(rl_graph_read_csv(prefix_c.as_ptr(), &mut loaded), RlStatus::Ok);
        assert_eq!(rl_graph_vertex_count(loaded), rl_graph_vertex_count(graph));
        assert_eq!(rl_graph_edge_count(loaded), rl_graph_edge_count(graph));

        rl_graph_free(loaded);
        rl_graph_free(graph);
        std::fs::remove_dir_all(&dir).ok();
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut graph: *mut RlGraph = ptr::null_mut();
        // alpha <= 1 is an invalid configuration.
        let status = rl_graph_generate(
            RlModel::Ird,
            RlDcmMode::Multigraph,
            100,
            0.9,
            8.0,
            2.5,
            12.0,
            RlDependence::Independent,
            0.85,
            false,
            1,
            &mut graph,
        );
        assert_eq!(status, RlStatus::InvalidArgument);
        let message = CStr::from_ptr(rl_last_error()).to_str().unwrap();
        assert!(message.contains("alpha"), "message: {message}");
        assert!(graph.is_null());

        // Null output pointer.
        let status = rl_pagerank(ptr::null(), 0.85, 30, ptr::null_mut());
        assert_eq!(status, RlStatus::InvalidArgument);

        // Bad Hill window.
        let data = [1.0, 2.0, 3.0];
        let mut alpha = 0.0;
        assert_eq!(
            rl_hill_index(data.as_ptr(), 3, 3, &mut alpha),
            RlStatus::InvalidArgument
        );
        assert_eq!(rl_version(), rl_version());
    }
}
