/** Canvas painter: executes draw ops verbatim. */

import type { DrawOp } from "./scene.js";

export function paint(ctx: CanvasRenderingContext2D, width: number, height: number, ops: DrawOp[]): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#f7f5f0";
  ctx.fillRect(0, 0, width, height);
  for (const op of ops) {
    switch (op.op) {
      case "line":
        ctx.strokeStyle = op.color;
        ctx.lineWidth = op.width;
        ctx.beginPath();
        ctx.moveTo(op.x1, op.y1);
        ctx.lineTo(op.x2, op.y2);
        ctx.stroke();
        break;
      case "polyline":
        if (op.points.length < 2) break;
        ctx.strokeStyle = op.color;
        ctx.lineWidth = op.width;
        ctx.beginPath();
        ctx.moveTo(op.points[0][0], op.points[0][1]);
        for (let i = 1; i < op.points.length; i++) ctx.lineTo(op.points[i][0], op.points[i][1]);
        ctx.stroke();
        break;
      case "circle":
        ctx.beginPath();
        ctx.arc(op.x, op.y, op.r, 0, 2 * Math.PI);
        if (op.fill) {
          ctx.fillStyle = op.color;
          ctx.fill();
        } else {
          ctx.strokeStyle = op.color;
          ctx.lineWidth = 2;
          ctx.stroke();
        }
        break;
      case "rect":
        if (op.fill) {
          ctx.fillStyle = op.color;
          ctx.fillRect(op.x, op.y, op.w, op.h);
        } else {
          ctx.strokeStyle = op.color;
          ctx.lineWidth = 1;
          ctx.strokeRect(op.x, op.y, op.w, op.h);
        }
        break;
      case "text":
        ctx.fillStyle = op.color;
        ctx.font = "13px system-ui, sans-serif";
        ctx.fillText(op.text, op.x, op.y);
        break;
    }
  }
}
