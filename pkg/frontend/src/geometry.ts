/**
 * Conversion of the /geometry payload into renderable mesh data: triangle
 * lists per surface, wireframe edges, and the scene bounds the camera needs.
 * Pure math only, so the 3D view stays a thin wrapper around it.
 */

import type { GeometryView } from "./api.js";

export type Vec3 = [number, number, number];

export interface MeshData {
  name: string;
  kind: "wall" | "floor" | "ceiling" | "window";
  outdoors: boolean;
  /** flat triangle list: 9 numbers per triangle */
  positions: number[];
  /** flat polygon outline: 6 numbers per edge segment */
  edges: number[];
}

export interface SceneData {
  meshes: MeshData[];
  center: Vec3;
  radius: number;
  northAxisDegrees: number;
}

function surfaceKind(type: string): MeshData["kind"] {
  const lower = type.toLowerCase();
  if (lower === "floor") return "floor";
  if (lower === "ceiling" || lower === "roof") return "ceiling";
  return "wall";
}

function subtract(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function norm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

/** Outward normal of a planar polygon (vertices are ordered consistently). */
export function polygonNormal(vertices: Vec3[]): Vec3 {
  const [a, b, c] = vertices;
  const n = cross(subtract(b, a), subtract(c, a));
  const length = norm(n) || 1;
  return [n[0] / length, n[1] / length, n[2] / length];
}

/** Fan-triangulate a convex planar polygon. */
export function triangulate(vertices: Vec3[], offset: Vec3 = [0, 0, 0]): number[] {
  const out: number[] = [];
  for (let i = 1; i + 1 < vertices.length; i++) {
    for (const v of [vertices[0], vertices[i], vertices[i + 1]]) {
      out.push(v[0] + offset[0], v[1] + offset[1], v[2] + offset[2]);
    }
  }
  return out;
}

function outline(vertices: Vec3[], offset: Vec3 = [0, 0, 0]): number[] {
  const out: number[] = [];
  for (let i = 0; i < vertices.length; i++) {
    const a = vertices[i];
    const b = vertices[(i + 1) % vertices.length];
    out.push(
      a[0] + offset[0], a[1] + offset[1], a[2] + offset[2],
      b[0] + offset[0], b[1] + offset[1], b[2] + offset[2],
    );
  }
  return out;
}

const WINDOW_LIFT = 0.02; // meters off the wall plane, against z-fighting

export function buildScene(view: GeometryView): SceneData {
  const meshes: MeshData[] = [];
  const points: Vec3[] = [];

  for (const surface of view.surfaces) {
    const vertices = surface.vertices as Vec3[];
    if (vertices.length < 3) continue;
    points.push(...vertices);
    meshes.push({
      name: surface.name,
      kind: surfaceKind(surface.type),
      outdoors: surface.boundary.toLowerCase() === "outdoors",
      positions: triangulate(vertices),
      edges: outline(vertices),
    });
  }

  const hostNormals = new Map<string, Vec3>();
  for (const surface of view.surfaces) {
    if (surface.vertices.length >= 3) {
      hostNormals.set(
        surface.name.toLowerCase(),
        polygonNormal(surface.vertices as Vec3[]),
      );
    }
  }
  for (const window of view.windows) {
    const vertices = window.vertices as Vec3[];
    if (vertices.length < 3) continue;
    const normal =
      hostNormals.get(window.host_surface.toLowerCase()) ?? polygonNormal(vertices);
    const lift: Vec3 = [
      normal[0] * WINDOW_LIFT,
      normal[1] * WINDOW_LIFT,
      normal[2] * WINDOW_LIFT,
    ];
    points.push(...vertices);
    meshes.push({
      name: window.name,
      kind: "window",
      outdoors: true,
      positions: triangulate(vertices, lift),
      edges: outline(vertices, lift),
    });
  }

  let center: Vec3 = [0, 0, 0];
  let radius = 1;
  if (points.length > 0) {
    const low: Vec3 = [...points[0]] as Vec3;
    const high: Vec3 = [...points[0]] as Vec3;
    for (const p of points) {
      for (let axis = 0; axis < 3; axis++) {
        low[axis] = Math.min(low[axis], p[axis]);
        high[axis] = Math.max(high[axis], p[axis]);
      }
    }
    center = [
      (low[0] + high[0]) / 2,
      (low[1] + high[1]) / 2,
      (low[2] + high[2]) / 2,
    ];
    radius = Math.max(norm(subtract(high, low)) / 2, 0.5);
  }
  return { meshes, center, radius, northAxisDegrees: view.north_axis };
}

export function windowCount(view: GeometryView): number {
  return view.windows.length;
}
