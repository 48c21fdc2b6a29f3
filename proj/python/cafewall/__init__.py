"""Cafe Wall illusion model: stimulus generation, DoG edge maps, Hough lines, tilt statistics."""

from ._core import (
    CafeWallSpec,
    HoughParams,
    IoError,
    LineSegment,
    ParameterError,
    RangeError,
    analyze_image,
    binarize,
    classify,
    detect_lines,
    dog_kernel,
    dog_response,
    edge_maps,
    generate_cafe_wall,
    hough_transform,
    preset_config,
    preset_names,
    read_png,
    run_experiment,
    segment_angle,
    set_thread_count,
    thread_count,
    window_side,
    write_png,
)

__all__ = [
    "CafeWallSpec",
    "HoughParams",
    "IoError",
    "LineSegment",
    "ParameterError",
    "RangeError",
    "analyze_image",
    "binarize",
    "classify",
    "detect_lines",
    "dog_kernel",
    "dog_response",
    "edge_maps",
    "generate_cafe_wall",
    "hough_transform",
    "preset_config",
    "preset_names",
    "read_png",
    "run_experiment",
    "segment_angle",
    "set_thread_count",
    "thread_count",
    "window_side",
    "write_png",
]
