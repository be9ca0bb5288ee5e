/**
 * Three.js wrapper around the pure scene data: solid surfaces, window panes,
 * wireframe edges and a north arrow that rotates with the building azimuth
 * (the room mesh itself stays axis-aligned, matching the model convention).
 */

import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";

import type { SceneData } from "./geometry.js";

const COLORS = {
  wall: 0xb8c4cf,
  floor: 0x8a939b,
  ceiling: 0xd7dde2,
  window: 0x66b2ff,
  outdoorsEdge: 0x1f2933,
  edge: 0x52606d,
  north: 0xcc3344,
};

export class RoomViewer {
  private renderer: THREE.WebGLRenderer;
  private scene = new THREE.Scene();
  private camera: THREE.PerspectiveCamera;
  private controls: OrbitControls;
  private roomGroup = new THREE.Group();
  private northGroup = new THREE.Group();
  private disposed = false;

  constructor(private container: HTMLElement) {
    this.renderer = new THREE.WebGLRenderer({ antialias: true });
    this.renderer.setPixelRatio(window.devicePixelRatio);
    container.appendChild(this.renderer.domElement);
    this.scene.background = new THREE.Color(0xf4f6f8);
    this.camera = new THREE.PerspectiveCamera(50, 1, 0.1, 500);
    this.camera.up.set(0, 0, 1); // z is height in the model
    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.enableDamping = true;

    this.scene.add(new THREE.AmbientLight(0xffffff, 0.75));
    const sun = new THREE.DirectionalLight(0xffffff, 1.2);
    sun.position.set(-8, -12, 16);
    this.scene.add(sun);
    this.scene.add(this.roomGroup);
    this.scene.add(this.northGroup);

    const animate = () => {
      if (this.disposed) return;
      requestAnimationFrame(animate);
      this.resizeToContainer();
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
    };
    animate();
  }

  private resizeToContainer(): void {
    const width = this.container.clientWidth || 400;
    const height = this.container.clientHeight || 300;
    const canvas = this.renderer.domElement;
    if (canvas.width !== width || canvas.height !== height) {
      this.renderer.setSize(width, height, false);
      this.camera.aspect = width / height;
      this.camera.updateProjectionMatrix();
    }
  }

  setScene(data: SceneData): void {
    this.roomGroup.clear();
    this.northGroup.clear();

    for (const mesh of data.meshes) {
      const geometry = new THREE.BufferGeometry();
      geometry.setAttribute(
        "position",
        new THREE.Float32BufferAttribute(mesh.positions, 3),
      );
      geometry.computeVertexNormals();
      const material = new THREE.MeshLambertMaterial({
        color: COLORS[mesh.kind],
        side: THREE.DoubleSide,
        transparent: mesh.kind === "window",
        opacity: mesh.kind === "window" ? 0.6 : 1.0,
      });
      this.roomGroup.add(new THREE.Mesh(geometry, material));

      const edgeGeometry = new THREE.BufferGeometry();
      edgeGeometry.setAttribute(
        "position",
        new THREE.Float32BufferAttribute(mesh.edges, 3),
      );
      const edgeMaterial = new THREE.LineBasicMaterial({
        color: mesh.outdoors ? COLORS.outdoorsEdge : COLORS.edge,
      });
      this.roomGroup.add(new THREE.LineSegments(edgeGeometry, edgeMaterial));
    }

    this.buildNorthArrow(data);

    const [cx, cy, cz] = data.center;
    this.controls.target.set(cx, cy, cz);
    this.camera.position.set(
      cx - data.radius * 1.6,
      cy - data.radius * 1.8,
      cz + data.radius * 1.2,
    );
    this.camera.near = data.radius / 100;
    this.camera.far = data.radius * 40;
    this.camera.updateProjectionMatrix();
  }

  /** Arrow pointing to true north: rotating the building azimuth rotates the
   * arrow, not the room mesh. */
  private buildNorthArrow(data: SceneData): void {
    const radians = (-data.northAxisDegrees * Math.PI) / 180;
    const direction = new THREE.Vector3(Math.sin(radians), Math.cos(radians), 0);
    const origin = new THREE.Vector3(
      data.center[0],
      data.center[1],
      0.02,
    );
    const length = data.radius * 1.4;
    const arrow = new THREE.ArrowHelper(
      direction,
      origin,
      length,
      COLORS.north,
      length * 0.15,
      length * 0.08,
    );
    this.northGroup.add(arrow);
  }

  dispose(): void {
    this.disposed = true;
    this.controls.dispose();
    this.renderer.dispose();
    this.renderer.domElement.remove();
  }
}
