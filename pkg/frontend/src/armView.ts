/**
 * Simplified 2-link planar arm animation, one pair per arm, driven by
 * shoulder pitch and elbow roll only. The joint plots remain the
 * authoritative view; this panel just gives the motion a silhouette.
 */

interface ArmPose {
  shoulderPitch: number;
  elbowRoll: number;
}

function drawArm(
  ctx: CanvasRenderingContext2D,
  originX: number,
  originY: number,
  pose: ArmPose,
  mirror: number,
  color: string,
): void {
  const upper = 52;
  const fore = 44;
  // rest pose points the arm downward; pitch swings it forward (canvas right)
  const a0 = Math.PI / 2 + mirror * pose.shoulderPitch * 1.8;
  const elbowX = originX + upper * Math.cos(a0) * mirror;
  const elbowY = originY + upper * Math.sin(a0);
  const a1 = a0 - mirror * pose.elbowRoll * 1.8;
  const handX = elbowX + fore * Math.cos(a1) * mirror;
  const handY = elbowY + fore * Math.sin(a1);

  ctx.strokeStyle = color;
  ctx.lineWidth = 5;
  ctx.lineCap = "round";
  ctx.beginPath();
  ctx.moveTo(originX, originY);
  ctx.lineTo(elbowX, elbowY);
  ctx.lineTo(handX, handY);
  ctx.stroke();
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(handX, handY, 5, 0, 2 * Math.PI);
  ctx.fill();
}

/** Render one frame; joints follow the service order: right arm first. */
export function drawArms(canvas: HTMLCanvasElement, frame: number[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const cx = width / 2;
  const cy = height * 0.35;

  // torso and head
  ctx.strokeStyle = "#444";
  ctx.lineWidth = 6;
  ctx.beginPath();
  ctx.moveTo(cx, cy - 8);
  ctx.lineTo(cx, cy + 55);
  ctx.stroke();
  ctx.beginPath();
  ctx.arc(cx, cy - 22, 12, 0, 2 * Math.PI);
  ctx.stroke();

  const right: ArmPose = { shoulderPitch: frame[0] ?? 0, elbowRoll: frame[3] ?? 0 };
  const left: ArmPose = { shoulderPitch: frame[4] ?? 0, elbowRoll: frame[7] ?? 0 };
  // right arm drawn on the viewer's left (robot faces the viewer)
  drawArm(ctx, cx - 18, cy, right, -1, "#d62728");
  drawArm(ctx, cx + 18, cy, left, 1, "#1f77b4");
}
