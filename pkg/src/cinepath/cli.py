"""Command-line interface.

Subcommands: synthesize, adjust, evaluate, project, shakeprofile, preview,
pipeline.  Every command is deterministic given its inputs, config, and seed.
Failures print a JSON object {code, message, context} to stderr and exit 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .aesthetics import adjust, apply_offset
from .config import RunConfig, load_config
from .errors import CinepathError, ConfigError
from .evaluation import (
    adj_dis,
    combined_trajectory_objective,
    emotion_correlation,
    immersion_score,
    point_loss,
    rot_shift,
    spatial_sync,
    vis_acc,
)
from .fileio import dump_json, json_ready, load_scene, read_trajectory, write_trajectory
from .preview import render_shot_svg
from .projection import body_center, project_points
from .scene import EmotionFactor, Scene
from .shakiness import shakiness_per_second, shakiness_vector, stationary_points
from .synthesis import synthesize

EMOTION_GRID = (0.5, 0.75, 1.0, 1.5, 2.0)


def _load_scene(path, config: RunConfig) -> Scene:
    scene = load_scene(path)
    intrinsics = config.intrinsics(scene.intrinsics)
    if intrinsics != scene.intrinsics:
        scene = replace(scene, intrinsics=intrinsics)
    return scene


def _write_or_print(data: dict, out) -> None:
    if out:
        dump_json(data, out)
    else:
        json.dump(json_ready(data), sys.stdout, indent=2)
        sys.stdout.write("\n")


def _provenance(config: RunConfig, scene: Scene = None, **extra) -> dict:
    info = {"tool": f"cinepath {__version__}", "seed": config.seed}
    if scene is not None:
        info["scene"] = scene.name
    info.update(extra)
    return info


def _emotion_sweep(scene: Scene, config: RunConfig) -> dict:
    """Synthesize across the E grid and correlate emotion with shakiness."""
    e_max = max(scene.emotion.e_max, max(EMOTION_GRID))
    totals = []
    for e in EMOTION_GRID:
        traj = synthesize(
            scene.poses,
            EmotionFactor(e, e_max),
            scene.camera,
            scene.layout,
            config.synthesis_config(),
        )
        totals.append(float(np.sum(shakiness_vector(traj))))
    corr = emotion_correlation(EMOTION_GRID, totals)
    return {
        "grid": list(EMOTION_GRID),
        "totals": totals,
        "pcc": corr.pcc,
        "srcc": corr.srcc,
        "krcc": corr.krcc,
    }


def _shakiness_block(trajectory) -> dict:
    vec = shakiness_vector(trajectory)
    return {
        "per_frame": vec.tolist(),
        "per_second": shakiness_per_second(vec, trajectory.fps).tolist(),
        "total": float(vec.sum()),
    }


def _evaluate_report(scene: Scene, trajectory, config: RunConfig, reference=None) -> dict:
    pose0 = scene.poses.frame(0)
    intr, layout = scene.intrinsics, scene.layout
    cam_initial = scene.camera_to_world(scene.camera.as_array())
    cam_final = scene.camera_to_world(trajectory.data[0])

    sync = spatial_sync(scene.poses, trajectory)
    sweep = _emotion_sweep(scene, config)
    shift_initial = rot_shift(pose0, cam_initial, intr, layout)
    shift_final = rot_shift(pose0, cam_final, intr, layout)
    accuracy = vis_acc(pose0, cam_initial, cam_final, intr)
    distance = adj_dis(cam_initial, cam_final)
    immersion = immersion_score(
        sync.distance,
        sweep["pcc"],
        shift_final,
        accuracy,
        config.alpha,
        config.beta,
        intr.frame_diagonal,
    )
    report = {
        "scene": scene.name,
        "frames": scene.poses.frame_count,
        "fps": scene.poses.fps,
        "emotion": scene.emotion.value,
        "shakiness": _shakiness_block(trajectory),
        "spatial_sync": {
            "distance": sync.distance,
            "degenerate_actor_axes": list(sync.degenerate_actor_axes),
            "degenerate_camera_axes": list(sync.degenerate_camera_axes),
        },
        "emotion_sweep": sweep,
        "aesthetics": {
            "rot_shift_initial": shift_initial,
            "rot_shift": shift_final,
            "adj_dis": distance,
            "vis_acc": accuracy,
        },
        "immersion": immersion.to_dict(),
    }
    if reference is not None:
        report["reference"] = {
            "point_loss": point_loss(reference, trajectory),
            "combined_objective": combined_trajectory_objective(
                reference, trajectory, config.lambda_mse, config.lambda_sk
            ),
        }
    return report


def _render_figures(out_dir, trajectory, shakiness_vectors: dict, sweep: dict = None) -> list:
    from .figures import emotion_sweep_figure, shakiness_figure, trajectory_figure

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [
        trajectory_figure(trajectory, out_dir / "trajectory.png"),
        shakiness_figure(shakiness_vectors, out_dir / "shakiness.png"),
    ]
    if sweep is not None:
        written.append(
            emotion_sweep_figure(sweep["grid"], sweep["totals"], out_dir / "emotion_sweep.png")
        )
    return written


def _config_from_args(args) -> RunConfig:
    overrides = {}
    for key in (
        "seed", "kappa", "base_shake", "smooth_window", "shake_frequency",
        "lambda_cmp", "lambda_adj", "lambda_vis", "alpha", "beta",
    ):
        if hasattr(args, key) and getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    bounds = getattr(args, "bounds", None)
    if bounds is not None:
        parts = bounds.split(",")
        if len(parts) != 2:
            raise ConfigError("--bounds expects 'position_m,rotation_deg'")
        try:
            overrides["bound_position"] = float(parts[0])
            overrides["bound_rotation_degrees"] = float(parts[1])
        except ValueError:
            raise ConfigError("--bounds expects two numbers") from None
    return load_config(getattr(args, "config", None), overrides)


def cmd_synthesize(args) -> int:
    config = _config_from_args(args)
    scene = _load_scene(args.scene, config)
    trajectory = synthesize(
        scene.poses, scene.emotion, scene.camera, scene.layout, config.synthesis_config()
    )
    write_trajectory(
        args.output,
        trajectory,
        _provenance(config, scene, stage="synthesized", emotion=scene.emotion.value),
    )
    return 0


def _adjust_offset(scene: Scene, trajectory, config: RunConfig):
    pose0 = scene.poses.frame(0)
    cam0_world = scene.camera_to_world(trajectory.data[0])
    return adjust(
        pose0,
        cam0_world,
        scene.intrinsics,
        scene.layout,
        config.aesthetic_weights(),
        config.offset_bounds(),
        seed=config.seed,
        starts=config.optimizer_starts,
        max_evaluations=config.optimizer_max_evaluations,
        xatol=config.optimizer_xatol,
    )


def _adjustment_report(scene: Scene, before, after, offset) -> dict:
    pose0 = scene.poses.frame(0)
    intr, layout = scene.intrinsics, scene.layout
    cam_before = scene.camera_to_world(before.data[0])
    cam_after = scene.camera_to_world(after.data[0])
    return {
        "offset": offset.as_array().tolist(),
        "rot_shift_before": rot_shift(pose0, cam_before, intr, layout),
        "rot_shift_after": rot_shift(pose0, cam_after, intr, layout),
        "adj_dis": adj_dis(cam_before, cam_after),
        "vis_acc": vis_acc(pose0, cam_before, cam_after, intr),
    }


def cmd_adjust(args) -> int:
    config = _config_from_args(args)
    scene = _load_scene(args.scene, config)
    trajectory = read_trajectory(args.trajectory, fps=scene.poses.fps)
    offset = _adjust_offset(scene, trajectory, config)
    adjusted = apply_offset(trajectory, offset)
    write_trajectory(
        args.output, adjusted, _provenance(config, scene, stage="adjusted")
    )
    if args.report:
        dump_json(_adjustment_report(scene, trajectory, adjusted, offset), args.report)
    return 0


def cmd_evaluate(args) -> int:
    config = _config_from_args(args)
    scene = _load_scene(args.scene, config)
    trajectory = read_trajectory(args.trajectory, fps=scene.poses.fps)
    reference = read_trajectory(args.reference, fps=scene.poses.fps) if args.reference else None
    report = _evaluate_report(scene, trajectory, config, reference)
    _write_or_print(report, args.output)
    if args.figures:
        _render_figures(
            args.figures,
            trajectory,
            {"trajectory": shakiness_vector(trajectory)},
            report["emotion_sweep"],
        )
    return 0


def cmd_project(args) -> int:
    config = _config_from_args(args)
    scene = _load_scene(args.scene, config)
    frame = args.frame
    if not 0 <= frame < scene.poses.frame_count:
        raise CinepathError(
            f"frame {frame} out of range 0..{scene.poses.frame_count - 1}", frame=frame
        )
    if args.trajectory:
        trajectory = read_trajectory(args.trajectory, fps=scene.poses.fps)
        if frame >= len(trajectory):
            raise CinepathError(f"trajectory has no row {frame}", frame=frame)
        camera = scene.camera_to_world(trajectory.data[frame])
    else:
        camera = scene.camera_to_world(scene.camera.as_array())
    pose = scene.poses.frame(frame)
    uv, depth, on = project_points(pose.positions, camera, scene.intrinsics)
    joints = [
        {
            "name": scene.layout.joint_names[j],
            "u": None if not depth[j] > 0 else float(uv[j, 0]),
            "v": None if not depth[j] > 0 else float(uv[j, 1]),
            "depth": float(depth[j]),
            "on_frame": bool(on[j]),
        }
        for j in range(scene.layout.joint_count)
    ]
    center = None
    if on.any():
        center = body_center(pose, camera, scene.intrinsics, scene.layout).tolist()
    report = {
        "scene": scene.name,
        "frame": frame,
        "camera_world": [float(v) for v in camera],
        "on_frame_count": int(np.count_nonzero(on)),
        "body_center": center,
        "joints": joints,
    }
    _write_or_print(report, args.output)
    return 0


def cmd_shakeprofile(args) -> int:
    trajectory = read_trajectory(args.trajectory, fps=args.fps)
    block = _shakiness_block(trajectory)
    block["stationary_counts"] = [
        len(stationary_points(trajectory.axis(q))) for q in range(6)
    ]
    block["frames"] = len(trajectory)
    block["fps"] = trajectory.fps
    _write_or_print(block, args.output)
    return 0


def cmd_preview(args) -> int:
    config = _config_from_args(args)
    scene = _load_scene(args.scene, config)
    trajectory = read_trajectory(args.trajectory, fps=scene.poses.fps)
    try:
        frames = [int(f) for f in args.frames.split(",") if f.strip() != ""]
    except ValueError:
        raise CinepathError(f"--frames expects comma-separated integers, got {args.frames!r}") from None
    if not frames:
        raise CinepathError("--frames selected no frames")
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    for t in frames:
        if not 0 <= t < min(scene.poses.frame_count, len(trajectory)):
            raise CinepathError(f"frame {t} out of range", frame=t)
        svg = render_shot_svg(
            scene.poses.frame(t),
            scene.camera_to_world(trajectory.data[t]),
            scene.intrinsics,
            scene.layout,
        )
        (out_dir / f"frame_{t:06d}.svg").write_text(svg)
    return 0


def run_pipeline(scene_path, out_dir, config: RunConfig) -> dict:
    """synthesize -> adjust -> apply_offset -> evaluate, all artifacts written."""
    scene = _load_scene(scene_path, config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    synthesized = synthesize(
        scene.poses, scene.emotion, scene.camera, scene.layout, config.synthesis_config()
    )
    offset = _adjust_offset(scene, synthesized, config)
    adjusted = apply_offset(synthesized, offset)

    write_trajectory(
        out_dir / "trajectory.csv",
        adjusted,
        _provenance(config, scene, stage="pipeline", emotion=scene.emotion.value),
    )
    report = _evaluate_report(scene, adjusted, config)
    report["adjustment"] = _adjustment_report(scene, synthesized, adjusted, offset)
    dump_json(report, out_dir / "report.json")

    svg = render_shot_svg(
        scene.poses.frame(0),
        scene.camera_to_world(adjusted.data[0]),
        scene.intrinsics,
        scene.layout,
    )
    (out_dir / "preview.svg").write_text(svg)
    _render_figures(
        out_dir / "figures",
        adjusted,
        {
            "synthesized": shakiness_vector(synthesized),
            "adjusted": shakiness_vector(adjusted),
        },
        report["emotion_sweep"],
    )
    return report


def _pipeline_worker(scene_path: str, out_dir: str, config: RunConfig) -> tuple:
    try:
        run_pipeline(scene_path, out_dir, config)
        return (Path(scene_path).stem, None)
    except CinepathError as exc:
        return (Path(scene_path).stem, exc.to_dict())


def cmd_pipeline(args) -> int:
    config = _config_from_args(args)
    out_dir = Path(args.output)
    if not args.batch:
        run_pipeline(args.scene, out_dir, config)
        return 0

    scene_dir = Path(args.scene)
    if not scene_dir.is_dir():
        raise CinepathError(f"--batch expects a directory of scenes, got {scene_dir}")
    scene_paths = sorted(scene_dir.glob("*.json"))
    if not scene_paths:
        raise CinepathError(f"no *.json scenes found in {scene_dir}")
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = args.jobs if args.jobs else 1
    tasks = [(str(p), str(out_dir / p.stem), config) for p in scene_paths]
    if jobs == 1:
        results = [_pipeline_worker(*task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_pipeline_worker, *zip(*tasks)))
    results.sort(key=lambda item: item[0])
    summary = {
        "scenes": len(results),
        "failed": sum(1 for _, err in results if err is not None),
        "runs": [
            {"scene": name, "status": "error" if err else "ok", "error": err}
            for name, err in results
        ],
    }
    dump_json(summary, out_dir / "batch_summary.json")
    return 1 if summary["failed"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cinepath",
        description="Actor-driven virtual camera trajectories with immersion metrics.",
    )
    parser.add_argument("--version", action="version", version=f"cinepath {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--seed", type=int, help="random seed override")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", parents=[common], help="scene -> camera trajectory CSV")
    p.add_argument("scene")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--kappa", type=float)
    p.add_argument("--base-shake", dest="base_shake", type=float)
    p.add_argument("--smooth-window", dest="smooth_window", type=int)
    p.add_argument("--shake-frequency", dest="shake_frequency", type=float)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("adjust", parents=[common], help="apply rule-of-thirds adjustment")
    p.add_argument("scene")
    p.add_argument("trajectory")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", help="write adjustment metrics JSON here")
    p.add_argument("--lambda-cmp", dest="lambda_cmp", type=float)
    p.add_argument("--lambda-adj", dest="lambda_adj", type=float)
    p.add_argument("--lambda-vis", dest="lambda_vis", type=float)
    p.add_argument("--bounds", help="offset box as 'position_m,rotation_deg'")
    p.set_defaults(func=cmd_adjust)

    p = sub.add_parser("evaluate", parents=[common], help="immersion report for a trajectory")
    p.add_argument("scene")
    p.add_argument("trajectory")
    p.add_argument("--reference", help="reference trajectory CSV for point loss")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("-o", "--output", help="report JSON path (default: stdout)")
    p.add_argument("--figures", help="directory for matplotlib figures")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("project", parents=[common], help="project one frame's joints")
    p.add_argument("scene")
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--trajectory", help="take the camera from this trajectory")
    p.add_argument("-o", "--output", help="JSON path (default: stdout)")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("shakeprofile", parents=[common], help="per-axis shakiness of a trajectory")
    p.add_argument("trajectory")
    p.add_argument("--fps", type=float, help="fps when no sidecar is present")
    p.add_argument("-o", "--output", help="JSON path (default: stdout)")
    p.set_defaults(func=cmd_shakeprofile)

    p = sub.add_parser("preview", parents=[common], help="SVG previews of selected frames")
    p.add_argument("scene")
    p.add_argument("trajectory")
    p.add_argument("--frames", default="0", help="comma-separated frame indices")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_preview)

    p = sub.add_parser("pipeline", parents=[common], help="synthesize + adjust + evaluate")
    p.add_argument("scene", help="scene file, or directory with --batch")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--batch", action="store_true", help="treat scene as a directory")
    p.add_argument("--jobs", type=int, help="parallel scenes in batch mode (default 1)")
    p.add_argument("--kappa", type=float)
    p.add_argument("--base-shake", dest="base_shake", type=float)
    p.add_argument("--smooth-window", dest="smooth_window", type=int)
    p.add_argument("--shake-frequency", dest="shake_frequency", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CinepathError as exc:
        json.dump(json_ready(exc.to_dict()), sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
