# Strong-separation logic package
