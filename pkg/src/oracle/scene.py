"""
Analytic Test Scene
Checkerboard ground, one flat-colored sphere, optional bright wall and a constant sky
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

# Intersections closer than this to the ray origin are ignored
MIN_HIT_DISTANCE = 1e-9

HDR_WALL_RADIANCE = 6.0

Color = Tuple[float, float, float]


class OracleSceneError(ValueError):
    """Exception raised for an invalid scene description"""
    pass


@dataclass(frozen=True)
class OracleSphere:
    center: Tuple[float, float, float] = (2.0, 1.0, 1.0)
    radius: float = 0.5
    color: Color = (0.15, 0.3, 0.6)


@dataclass(frozen=True)
class BrightWall:
    """
    Uniform emitting rectangle spanned by two perpendicular edges from a corner

    The default stands upright at x = -4, facing +X.
    """

    corner: Tuple[float, float, float] = (-4.0, -2.0, 0.0)
    edge_u: Tuple[float, float, float] = (0.0, 4.0, 0.0)
    edge_v: Tuple[float, float, float] = (0.0, 0.0, 3.0)
    radiance: float = HDR_WALL_RADIANCE

    def __post_init__(self):
        e1 = np.asarray(self.edge_u, dtype=np.float64)
        e2 = np.asarray(self.edge_v, dtype=np.float64)
        if np.linalg.norm(e1) == 0 or np.linalg.norm(e2) == 0:
            raise OracleSceneError("Wall edges must be non-zero")
        if abs(np.dot(e1, e2)) > 1e-9 * np.linalg.norm(e1) * np.linalg.norm(e2):
            raise OracleSceneError("Wall edges must be perpendicular")
        if not self.radiance > 0:
            raise OracleSceneError(f"Wall radiance must be > 0, got {self.radiance}")


@dataclass(frozen=True)
class OracleScene:
    """
    Flat-shaded analytic scene

    The ground is the plane z = 0 tiled with 1 m checker cells; cell (i, j)
    takes checker_colors[(i + j) % 2]. The sphere must float above the
    ground.
    """

    sphere: Optional[OracleSphere] = field(default_factory=OracleSphere)
    ground: bool = True
    checker_colors: Tuple[Color, Color] = ((0.4, 0.4, 0.4), (0.6, 0.55, 0.5))
    sky_color: Color = (0.5, 0.7, 0.9)
    wall: Optional[BrightWall] = None

    def __post_init__(self):
        if self.sphere is not None:
            if not self.sphere.radius > 0:
                raise OracleSceneError(f"Sphere radius must be > 0, got {self.sphere.radius}")
            if self.ground and not self.sphere.center[2] > self.sphere.radius:
                raise OracleSceneError(
                    f"Sphere must float above the ground: center z {self.sphere.center[2]} "
                    f"<= radius {self.sphere.radius}"
                )
        for color in (*self.checker_colors, self.sky_color):
            if any(c < 0 for c in color):
                raise OracleSceneError(f"Colors must be non-negative, got {color}")

    @classmethod
    def sky_only(cls, sky_color: Color = (0.5, 0.7, 0.9)) -> 'OracleScene':
        return cls(sphere=None, ground=False, sky_color=sky_color)

    def with_hdr_wall(self) -> 'OracleScene':
        """Same scene plus the default bright wall"""
        return OracleScene(
            sphere=self.sphere,
            ground=self.ground,
            checker_colors=self.checker_colors,
            sky_color=self.sky_color,
            wall=BrightWall(),
        )


@dataclass(frozen=True)
class TraceHit:
    color: np.ndarray
    raylen: float


def trace_rays(
    scene: OracleScene,
    origin: np.ndarray,
    dirs: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Trace many rays through the scene

    Args:
        scene: Scene to trace
        origin: Ray origin(s), broadcastable against dirs
        dirs: Unit world-space directions, trailing axis of 3

    Returns:
        Tuple of (linear RGB with a trailing axis of 3, ray length or +inf for sky)
    """
    dirs = np.asarray(dirs, dtype=np.float64)
    origin = np.broadcast_to(np.asarray(origin, dtype=np.float64), dirs.shape)

    shape = dirs.shape[:-1]
    best = np.full(shape, np.inf)
    colors = np.broadcast_to(np.asarray(scene.sky_color, dtype=np.float64), dirs.shape).copy()

    with np.errstate(divide='ignore', invalid='ignore'):
        if scene.ground:
            t = _intersect_ground(origin, dirs)
            closer = t < best
            points = origin + t[..., None] * dirs
            cells = (np.floor(points[..., 0]) + np.floor(points[..., 1])) % 2
            dark = np.asarray(scene.checker_colors[0], dtype=np.float64)
            light = np.asarray(scene.checker_colors[1], dtype=np.float64)
            checker = np.where((cells == 0)[..., None], dark, light)
            colors = np.where(closer[..., None], checker, colors)
            best = np.where(closer, t, best)

        if scene.sphere is not None:
            t = _intersect_sphere(scene.sphere, origin, dirs)
            closer = t < best
            colors = np.where(closer[..., None], np.asarray(scene.sphere.color, dtype=np.float64), colors)
            best = np.where(closer, t, best)

        if scene.wall is not None:
            t = _intersect_wall(scene.wall, origin, dirs)
            closer = t < best
            colors = np.where(closer[..., None], scene.wall.radiance, colors)
            best = np.where(closer, t, best)

    return colors, best


def trace(scene: OracleScene, origin, direction) -> TraceHit:
    """
    Trace a single ray

    Args:
        scene: Scene to trace
        origin: Ray origin (x, y, z)
        direction: Unit direction

    Returns:
        TraceHit with the flat color and the ray length (+inf for sky)
    """
    colors, raylen = trace_rays(scene, origin, np.asarray(direction, dtype=np.float64)[None, :])
    return TraceHit(color=colors[0], raylen=float(raylen[0]))


def _valid_distance(t: np.ndarray) -> np.ndarray:
    return np.where(np.isfinite(t) & (t > MIN_HIT_DISTANCE), t, np.inf)


def _intersect_ground(origin: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    return _valid_distance(-origin[..., 2] / dirs[..., 2])


def _intersect_sphere(sphere: OracleSphere, origin: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    oc = origin - np.asarray(sphere.center, dtype=np.float64)
    b = np.sum(oc * dirs, axis=-1)
    c = np.sum(oc * oc, axis=-1) - sphere.radius * sphere.radius
    disc = b * b - c
    root = np.sqrt(np.where(disc >= 0, disc, np.nan))
    near = _valid_distance(-b - root)
    far = _valid_distance(-b + root)
    return np.where(np.isfinite(near), near, far)


def _intersect_wall(wall: BrightWall, origin: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    corner = np.asarray(wall.corner, dtype=np.float64)
    e1 = np.asarray(wall.edge_u, dtype=np.float64)
    e2 = np.asarray(wall.edge_v, dtype=np.float64)
    normal = np.cross(e1, e2)

    t = _valid_distance(((corner - origin) @ normal) / (dirs @ normal))
    local = origin + np.where(np.isfinite(t), t, 0.0)[..., None] * dirs - corner
    a = (local @ e1) / np.dot(e1, e1)
    b = (local @ e2) / np.dot(e2, e2)
    inside = (a >= 0) & (a <= 1) & (b >= 0) & (b <= 1)
    return np.where(inside, t, np.inf)
