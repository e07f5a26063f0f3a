public @interface TestMarker {
    String value() default "";
}
